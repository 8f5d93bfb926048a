#include "gpfusion/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "gpfusion/error.hpp"

namespace gpfusion {

namespace {

constexpr std::string_view kOpNames[] = {"add", "sub", "mul", "div", "min",
                                         "max", "avg", "var", "const"};

struct EvalResult {
  double value;
  std::size_t next;
};

EvalResult eval_at(std::span<const Node> nodes, std::size_t i, std::span<const double> scores) {
  const Node& n = nodes[i];
  switch (n.op) {
    case Op::Var: return {scores[n.variable], i + 1};
    case Op::Const: return {n.value, i + 1};
    default: {
      auto left = eval_at(nodes, i + 1, scores);
      auto right = eval_at(nodes, left.next, scores);
      return {apply_function(n.op, left.value, right.value), right.next};
    }
  }
}

void append_sexpr(std::string& out, std::span<const Node> nodes, std::size_t& i) {
  const Node& n = nodes[i++];
  out += '(';
  out += op_name(n.op);
  if (n.op == Op::Var) {
    out += ' ';
    out += std::to_string(n.variable);
  } else if (n.op == Op::Const) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.value);
    out += ' ';
    out.append(buf, ptr);
  } else {
    out += ' ';
    append_sexpr(out, nodes, i);
    out += ' ';
    append_sexpr(out, nodes, i);
  }
  out += ')';
}

class SexprParser {
 public:
  explicit SexprParser(std::string_view text) : text_(text) {}

  std::vector<Node> parse() {
    std::vector<Node> nodes;
    parse_expr(nodes);
    auto tok = next_token();
    if (!tok.empty()) fail("unexpected trailing token", tok);
    return nodes;
  }

 private:
  std::string_view next_token() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) return {};
    token_start_ = pos_;
    if (text_[pos_] == '(' || text_[pos_] == ')') return text_.substr(pos_++, 1);
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(const std::string& what, std::string_view token) const {
    throw ParseError(what + " '" + std::string(token.empty() ? "<end of input>" : token) +
                     "' at offset " + std::to_string(token_start_));
  }

  void expect(std::string_view want) {
    auto tok = next_token();
    if (tok != want) fail("expected '" + std::string(want) + "', got", tok);
  }

  void parse_expr(std::vector<Node>& nodes) {
    expect("(");
    auto head = next_token();
    auto op = op_from_name(head);
    if (!op) fail("unknown operator", head);
    if (*op == Op::Var) {
      auto tok = next_token();
      std::uint32_t index = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), index);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
        fail("invalid variable index", tok);
      nodes.push_back(Node::var(index));
    } else if (*op == Op::Const) {
      auto tok = next_token();
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size() ||
          !std::isfinite(value))
        fail("invalid constant", tok);
      nodes.push_back(Node::constant(value));
    } else {
      nodes.push_back(Node::function(*op));
      parse_expr(nodes);
      parse_expr(nodes);
    }
    expect(")");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t token_start_ = 0;
};

}  // namespace

std::string_view op_name(Op op) noexcept { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < std::size(kOpNames); ++i)
    if (kOpNames[i] == name) return static_cast<Op>(i);
  return std::nullopt;
}

bool is_well_formed(std::span<const Node> prefix) noexcept {
  std::size_t open = 1;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (open == 0) return false;
    open = prefix[i].is_function() ? open + 1 : open - 1;
  }
  return open == 0 && !prefix.empty();
}

std::size_t fragment_depth(std::span<const Node> prefix) {
  // Pending child slots per open function, tracked as a level stack.
  std::vector<std::size_t> levels{0};
  std::size_t deepest = 0;
  for (const auto& n : prefix) {
    const std::size_t level = levels.back();
    levels.pop_back();
    deepest = std::max(deepest, level);
    if (n.is_function()) {
      levels.push_back(level + 1);
      levels.push_back(level + 1);
    }
  }
  return deepest;
}

ExpressionTree::ExpressionTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
  if (!is_well_formed(nodes_)) throw ValidationError("malformed expression tree");
  if (!nodes_.front().is_function())
    throw ValidationError("expression tree root must be a function");
  depth_ = fragment_depth(nodes_);
}

std::size_t ExpressionTree::subtree_end(std::size_t index) const {
  std::size_t open = 1;
  std::size_t j = index;
  while (open > 0) {
    open = nodes_[j].is_function() ? open + 1 : open - 1;
    ++j;
  }
  return j;
}

std::vector<std::size_t> ExpressionTree::node_levels() const {
  std::vector<std::size_t> out(nodes_.size());
  std::vector<std::size_t> levels{0};
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out[i] = levels.back();
    levels.pop_back();
    if (nodes_[i].is_function()) {
      levels.push_back(out[i] + 1);
      levels.push_back(out[i] + 1);
    }
  }
  return out;
}

std::size_t ExpressionTree::subtree_depth(std::size_t index) const {
  return fragment_depth(std::span(nodes_).subspan(index, subtree_end(index) - index));
}

std::optional<std::uint32_t> ExpressionTree::max_variable() const noexcept {
  std::optional<std::uint32_t> best;
  for (const auto& n : nodes_)
    if (n.op == Op::Var && (!best || n.variable > *best)) best = n.variable;
  return best;
}

bool ExpressionTree::is_valid(std::size_t modality_count, std::size_t max_depth) const noexcept {
  if (nodes_.empty() || !nodes_.front().is_function() || depth_ > max_depth) return false;
  auto mv = max_variable();
  return !mv || *mv < modality_count;
}

double eval_tree(const ExpressionTree& tree, std::span<const double> scores) {
  return eval_at(tree.nodes(), 0, scores).value;
}

std::string to_sexpr(const ExpressionTree& tree) {
  std::string out;
  std::size_t i = 0;
  append_sexpr(out, tree.nodes(), i);
  return out;
}

ExpressionTree parse_sexpr(std::string_view text) {
  auto nodes = SexprParser(text).parse();
  if (!nodes.front().is_function())
    throw ParseError("tree root must be a function, got '" +
                     std::string(op_name(nodes.front().op)) + "'");
  return ExpressionTree(std::move(nodes));
}

}  // namespace gpfusion
