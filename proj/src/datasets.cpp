#include "gpfusion/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "gpfusion/error.hpp"
#include "gpfusion/io.hpp"

namespace gpfusion {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::vector<double> column(const std::vector<ScoreTuple>& tuples, std::size_t m) {
  std::vector<double> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) out.push_back(t.scores[m]);
  return out;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

ScoreDataset::ScoreDataset(std::string name, std::size_t modality_count,
                           std::vector<ScoreTuple> genuine, std::vector<ScoreTuple> impostor)
    : name_(std::move(name)),
      modality_count_(modality_count),
      genuine_(std::move(genuine)),
      impostor_(std::move(impostor)) {
  if (modality_count_ < 1) throw ValidationError("modality count must be positive");
  auto check = [&](const std::vector<ScoreTuple>& tuples, Label label) {
    for (const auto& t : tuples) {
      if (t.scores.size() != modality_count_)
        throw ValidationError("tuple has " + std::to_string(t.scores.size()) +
                              " scores, expected " + std::to_string(modality_count_));
      if (t.label != label) throw ValidationError("tuple label does not match its class block");
      for (double s : t.scores)
        if (!std::isfinite(s)) throw ValidationError("non-finite score");
    }
  };
  check(genuine_, Label::Genuine);
  check(impostor_, Label::Impostor);
}

void ScoreDataset::require_non_empty() const {
  if (genuine_.empty()) throw ValidationError("dataset '" + name_ + "' has no genuine tuples");
  if (impostor_.empty()) throw ValidationError("dataset '" + name_ + "' has no impostor tuples");
}

std::vector<double> ScoreDataset::genuine_column(std::size_t m) const { return column(genuine_, m); }
std::vector<double> ScoreDataset::impostor_column(std::size_t m) const {
  return column(impostor_, m);
}

void SyntheticSpec::validate() const {
  if (modalities.empty()) throw ValidationError("synthetic data needs at least one modality");
  if (genuine_count == 0 || impostor_count == 0)
    throw ValidationError("synthetic data needs positive genuine and impostor counts");
  for (std::size_t m = 0; m < modalities.size(); ++m) {
    const auto& d = modalities[m];
    if (!(d.genuine_stddev > 0.0) || !(d.impostor_stddev > 0.0))
      throw ValidationError("modality " + std::to_string(m) + ": stddev must be positive");
    if (!std::isfinite(d.genuine_mean) || !std::isfinite(d.impostor_mean) ||
        !std::isfinite(d.genuine_stddev) || !std::isfinite(d.impostor_stddev))
      throw ValidationError("modality " + std::to_string(m) + ": non-finite parameter");
  }
}

ScoreDataset parse_dataset(const std::string& text, std::size_t modality_count,
                           const LoadOptions& options) {
  if (modality_count < 2) throw ValidationError("modality count must be at least 2");
  for (auto m : options.negate_modalities)
    if (m >= modality_count)
      throw ValidationError("negated modality " + std::to_string(m) + " out of range");

  std::vector<ScoreTuple> genuine, impostor;
  std::string_view rest(text);
  std::size_t line_no = 0;
  bool first_row = true;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    auto fields = split_fields(line);
    if (first_row) {
      first_row = false;
      double probe;
      if (!parse_double(fields.front(), probe)) continue;  // header
    }
    if (fields.size() != modality_count + 1)
      throw ParseError("expected " + std::to_string(modality_count + 1) + " columns, got " +
                           std::to_string(fields.size()),
                       line_no);

    ScoreTuple tuple;
    tuple.scores.resize(modality_count);
    for (std::size_t m = 0; m < modality_count; ++m) {
      if (!parse_double(fields[m], tuple.scores[m]) || !std::isfinite(tuple.scores[m]))
        throw ParseError("non-numeric score '" + std::string(fields[m]) + "'", line_no);
    }
    for (auto m : options.negate_modalities) tuple.scores[m] = -tuple.scores[m];

    auto label = fields.back();
    if (iequals(label, "genuine")) {
      tuple.label = Label::Genuine;
      genuine.push_back(std::move(tuple));
    } else if (iequals(label, "impostor")) {
      tuple.label = Label::Impostor;
      impostor.push_back(std::move(tuple));
    } else {
      throw ParseError("unknown label '" + std::string(label) + "'", line_no);
    }
  }

  ScoreDataset ds(options.name, modality_count, std::move(genuine), std::move(impostor));
  ds.require_non_empty();
  return ds;
}

ScoreDataset load_dataset(const std::filesystem::path& path, std::size_t modality_count,
                          const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open score file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadOptions named = options;
  if (named.name.empty()) named.name = path.stem().string();
  return parse_dataset(buf.str(), modality_count, named);
}

std::string format_dataset(const ScoreDataset& ds) {
  std::string out;
  out.reserve((ds.genuine().size() + ds.impostor().size()) * (ds.modality_count() * 20 + 10));
  auto emit = [&](const std::vector<ScoreTuple>& tuples, std::string_view label) {
    for (const auto& t : tuples) {
      for (double s : t.scores) {
        append_number(out, s);
        out += ',';
      }
      out += label;
      out += '\n';
    }
  };
  emit(ds.genuine(), "genuine");
  emit(ds.impostor(), "impostor");
  return out;
}

void save_dataset(const ScoreDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, format_dataset(ds));
}

SplitPair split_dataset(const ScoreDataset& ds) {
  if (ds.genuine().size() < 2 || ds.impostor().size() < 2)
    throw ValidationError("split needs at least 2 genuine and 2 impostor tuples");
  auto halve = [](const std::vector<ScoreTuple>& v) {
    auto cut = static_cast<std::ptrdiff_t>((v.size() + 1) / 2);
    return std::pair{std::vector<ScoreTuple>(v.begin(), v.begin() + cut),
                     std::vector<ScoreTuple>(v.begin() + cut, v.end())};
  };
  auto [gt, gv] = halve(ds.genuine());
  auto [it, iv] = halve(ds.impostor());
  return {ScoreDataset(ds.name() + "/train", ds.modality_count(), std::move(gt), std::move(it)),
          ScoreDataset(ds.name() + "/validation", ds.modality_count(), std::move(gv),
                       std::move(iv))};
}

ScoreDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto n = spec.modalities.size();
  auto draw = [&](std::size_t count, Label label) {
    std::vector<ScoreTuple> out(count);
    for (auto& t : out) {
      t.label = label;
      t.scores.resize(n);
      for (std::size_t m = 0; m < n; ++m) {
        const auto& d = spec.modalities[m];
        std::normal_distribution<double> dist =
            label == Label::Genuine ? std::normal_distribution<double>(d.genuine_mean, d.genuine_stddev)
                                    : std::normal_distribution<double>(d.impostor_mean, d.impostor_stddev);
        t.scores[m] = dist(rng);
      }
    }
    return out;
  };
  auto genuine = draw(spec.genuine_count, Label::Genuine);
  auto impostor = draw(spec.impostor_count, Label::Impostor);
  return ScoreDataset(spec.name, n, std::move(genuine), std::move(impostor));
}

ScoreDataset select_modalities(const ScoreDataset& ds, std::span<const std::size_t> modalities) {
  if (modalities.empty()) throw ValidationError("no modalities selected");
  for (auto m : modalities)
    if (m >= ds.modality_count())
      throw ValidationError("modality " + std::to_string(m) + " out of range");
  auto project = [&](const std::vector<ScoreTuple>& tuples) {
    std::vector<ScoreTuple> out;
    out.reserve(tuples.size());
    for (const auto& t : tuples) {
      ScoreTuple p{{}, t.label};
      p.scores.reserve(modalities.size());
      for (auto m : modalities) p.scores.push_back(t.scores[m]);
      out.push_back(std::move(p));
    }
    return out;
  };
  return ScoreDataset(ds.name(), modalities.size(), project(ds.genuine()),
                      project(ds.impostor()));
}

namespace presets {

namespace {

SyntheticSpec shaped(std::string name, std::vector<double> separations, std::size_t genuine,
                     std::size_t impostor, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.name = std::move(name);
  for (double d : separations) spec.modalities.push_back({d, 1.0, 0.0, 1.0});
  spec.genuine_count = genuine;
  spec.impostor_count = impostor;
  spec.seed = seed;
  return spec;
}

}  // namespace

SyntheticSpec bssr1(std::uint64_t seed) {
  return shaped("bssr1-shaped", {3.4, 4.2, 2.6, 3.0}, 512, 261632, seed);
}

SyntheticSpec private_db(std::uint64_t seed) {
  return shaped("private-shaped", {2.7, 2.4, 2.0, 3.1, 1.0}, 1600, 158400, seed);
}

SyntheticSpec banca(std::uint64_t seed) {
  return shaped("banca-shaped", {3.4, 2.4, 2.7, 2.9}, 467, 624, seed);
}

SyntheticSpec separable(std::uint64_t seed, std::size_t per_class) {
  return shaped("separable", {10.0, 10.0}, per_class, per_class, seed);
}

SyntheticSpec graded_overlap(std::uint64_t seed, std::size_t genuine_count,
                             std::size_t impostor_count) {
  // Unit-variance Gaussians d apart have EER = Phi(-d/2).
  return shaped("graded-overlap", {2.0728668, 1.6832424, 1.3489795, 1.0488010}, genuine_count,
                impostor_count, seed);
}

}  // namespace presets

}  // namespace gpfusion
