#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gpfusion {

enum class Op : std::uint8_t { Add, Sub, Mul, Div, Min, Max, Avg, Var, Const };

inline constexpr std::size_t kFunctionCount = 7;
inline constexpr Op kFunctions[kFunctionCount] = {Op::Add, Op::Sub, Op::Mul, Op::Div,
                                                  Op::Min, Op::Max, Op::Avg};

// Divisors smaller than this in magnitude make div return 1.
inline constexpr double kDivisionGuard = 1e-12;

struct Node {
  Op op = Op::Const;
  std::uint32_t variable = 0;
  double value = 0.0;

  constexpr bool is_function() const noexcept { return op != Op::Var && op != Op::Const; }
  bool operator==(const Node&) const = default;

  static constexpr Node function(Op op) noexcept { return {op, 0, 0.0}; }
  static constexpr Node var(std::uint32_t index) noexcept { return {Op::Var, index, 0.0}; }
  static constexpr Node constant(double v) noexcept { return {Op::Const, 0, v}; }
};

std::string_view op_name(Op op) noexcept;
std::optional<Op> op_from_name(std::string_view name) noexcept;

// Binary function application. Division is protected and every result is
// clamped to the finite range, so finite inputs give finite outputs.
inline double apply_function(Op op, double x, double y) noexcept {
  double r;
  switch (op) {
    case Op::Add: r = x + y; break;
    case Op::Sub: r = x - y; break;
    case Op::Mul: r = x * y; break;
    case Op::Div: r = (y < kDivisionGuard && y > -kDivisionGuard) ? 1.0 : x / y; break;
    case Op::Min: r = x < y ? x : y; break;
    case Op::Max: r = x < y ? y : x; break;
    case Op::Avg: r = 0.5 * (x + y); break;
    default: r = 0.0; break;
  }
  constexpr double big = std::numeric_limits<double>::max();
  return r > big ? big : (r < -big ? -big : r);
}

/// A fusion function: binary operators over modality scores and constants,
/// stored in prefix order. The root is always a function node.
class ExpressionTree {
 public:
  // Throws ValidationError unless `prefix` encodes exactly one well-formed
  // tree with a function root.
  explicit ExpressionTree(std::vector<Node> prefix);

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  // Edges on the longest root-to-leaf path; (add a b) has depth 1.
  std::size_t depth() const noexcept { return depth_; }

  // One past the last node of the subtree rooted at `index`.
  std::size_t subtree_end(std::size_t index) const;
  // Depth of each node measured from the root.
  std::vector<std::size_t> node_levels() const;
  std::size_t subtree_depth(std::size_t index) const;

  // Largest variable index referenced, if any.
  std::optional<std::uint32_t> max_variable() const noexcept;

  // Function root, depth <= max_depth and variables < modality_count.
  bool is_valid(std::size_t modality_count, std::size_t max_depth) const noexcept;

  bool operator==(const ExpressionTree& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::size_t depth_ = 0;
};

// Well-formedness of a prefix fragment (no root restriction).
bool is_well_formed(std::span<const Node> prefix) noexcept;
std::size_t fragment_depth(std::span<const Node> prefix);

// Scalar evaluation of one tuple.
double eval_tree(const ExpressionTree& tree, std::span<const double> scores);

std::string to_sexpr(const ExpressionTree& tree);
// Throws ParseError naming the offending token.
ExpressionTree parse_sexpr(std::string_view text);

}  // namespace gpfusion
