#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lbpforge {

enum class Op : std::uint8_t { Add = 0, Sub = 1, Mul = 2, Div = 3 };

enum class LeafKind : std::uint8_t { NeighborGray, CenterGray, OffsetTerm, Constant };

char op_symbol(Op op) noexcept;

// Denominators with magnitude below this evaluate the quotient to 0.
inline constexpr double kProtectedDivisionEpsilon = 1e-6;

double protected_div(double num, double den) noexcept;

double apply_op(Op op, double lhs, double rhs) noexcept;

// One operator code per internal node, in pre-order (node, then left
// subtree, then right subtree). Codes 0..3 map to + - * /.
using OperatorAssignment = std::vector<std::uint8_t>;

/// Immutable arithmetic syntax tree over the LBP alphabet {g_p, g_c, a,
/// numeric constants} with binary operators {+, -, *, /}. Copies share
/// structure; all members are const.
class Expression {
 public:
  struct Node;

  static Expression leaf(LeafKind kind, double value = 0.0);
  static Expression neighbor() { return leaf(LeafKind::NeighborGray); }
  static Expression center() { return leaf(LeafKind::CenterGray); }
  static Expression offset() { return leaf(LeafKind::OffsetTerm); }
  static Expression constant(double value) { return leaf(LeafKind::Constant, value); }
  static Expression binary(Op op, Expression lhs, Expression rhs);

  bool is_leaf() const noexcept;
  LeafKind leaf_kind() const;  // precondition: is_leaf()
  double constant_value() const;
  Op op() const;  // precondition: !is_leaf()
  Expression lhs() const;
  Expression rhs() const;

  std::size_t operator_count() const noexcept;
  bool contains(LeafKind kind) const noexcept;

  OperatorAssignment operators() const;
  // Same shape and leaves, operators replaced slot by slot.
  Expression with_operators(const OperatorAssignment& codes) const;

  friend bool operator==(const Expression& a, const Expression& b) noexcept;

  const Node& root() const noexcept { return *root_; }

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

struct Expression::Node {
  bool leaf = true;
  LeafKind kind = LeafKind::Constant;
  double value = 0.0;
  Op op = Op::Add;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;
  std::size_t operators = 0;
};

/// Parses equation text. Standard precedence (* and / bind tighter than + and
/// -), left associative, parentheses override. Accepts U+2212 as minus.
/// Throws SyntaxError carrying the byte offset of the offending token.
Expression parse(std::string_view text);

/// Fully parenthesized canonical text, e.g. "((g_p - g_c) + a)". Leaves are
/// not parenthesized. This is also the deduplication key.
std::string render(const Expression& e);

/// Tree-walking evaluation; the reference semantics.
double evaluate(const Expression& e, double g_p, double g_c, double a) noexcept;

/// Flattened postfix program with the same arithmetic as evaluate(), in the
/// same order, so results are bit-identical. Used in the per-pixel kernels.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expression& e);

  double operator()(double g_p, double g_c, double a) const noexcept;

  std::size_t stack_depth() const noexcept { return max_depth_; }

 private:
  enum class Code : std::uint8_t { PushNeighbor, PushCenter, PushOffset, PushConst, Add, Sub, Mul, Div };
  struct Instr {
    Code code;
    double value;
  };
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
};

/// All operator reassignments of `e` in lexicographic order over the codes
/// (slot 0 most significant), min(4^eta, cap) of them. When the cap truncates
/// the list the identity assignment is kept by displacing the last entry.
std::vector<Expression> enumerate_mutations(const Expression& e, std::size_t cap);

std::vector<OperatorAssignment> enumerate_assignments(const OperatorAssignment& identity, std::size_t cap);

/// Reads a newline-delimited corpus. Blank lines and lines starting with '#'
/// are skipped. Errors report the 1-based line number.
std::vector<Expression> parse_corpus(std::string_view text);

}  // namespace lbpforge
