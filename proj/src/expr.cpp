#include "lbpforge/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "lbpforge/errors.hpp"

namespace lbpforge {

char op_symbol(Op op) noexcept {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
  }
  return '?';
}

double protected_div(double num, double den) noexcept {
  return std::abs(den) < kProtectedDivisionEpsilon ? 0.0 : num / den;
}

double apply_op(Op op, double lhs, double rhs) noexcept {
  switch (op) {
    case Op::Add: return lhs + rhs;
    case Op::Sub: return lhs - rhs;
    case Op::Mul: return lhs * rhs;
    case Op::Div: return protected_div(lhs, rhs);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Expression

Expression Expression::leaf(LeafKind kind, double value) {
  auto node = std::make_shared<Node>();
  node->leaf = true;
  node->kind = kind;
  node->value = kind == LeafKind::Constant ? value : 0.0;
  return Expression(std::move(node));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  auto node = std::make_shared<Node>();
  node->leaf = false;
  node->op = op;
  node->operators = 1 + lhs.root_->operators + rhs.root_->operators;
  node->left = std::move(lhs.root_);
  node->right = std::move(rhs.root_);
  return Expression(std::move(node));
}

bool Expression::is_leaf() const noexcept { return root_->leaf; }

LeafKind Expression::leaf_kind() const {
  if (!root_->leaf) throw InvalidArgument("leaf_kind() on an operator node");
  return root_->kind;
}

double Expression::constant_value() const {
  if (!root_->leaf || root_->kind != LeafKind::Constant) throw InvalidArgument("constant_value() on a non-constant");
  return root_->value;
}

Op Expression::op() const {
  if (root_->leaf) throw InvalidArgument("op() on a leaf");
  return root_->op;
}

Expression Expression::lhs() const {
  if (root_->leaf) throw InvalidArgument("lhs() on a leaf");
  return Expression(root_->left);
}

Expression Expression::rhs() const {
  if (root_->leaf) throw InvalidArgument("rhs() on a leaf");
  return Expression(root_->right);
}

std::size_t Expression::operator_count() const noexcept { return root_->operators; }

namespace {

bool contains_kind(const Expression::Node& n, LeafKind kind) {
  if (n.leaf) return n.kind == kind;
  return contains_kind(*n.left, kind) || contains_kind(*n.right, kind);
}

void collect_ops(const Expression::Node& n, OperatorAssignment& out) {
  if (n.leaf) return;
  out.push_back(static_cast<std::uint8_t>(n.op));
  collect_ops(*n.left, out);
  collect_ops(*n.right, out);
}

bool same_tree(const Expression::Node& a, const Expression::Node& b) {
  if (&a == &b) return true;
  if (a.leaf != b.leaf) return false;
  if (a.leaf) {
    if (a.kind != b.kind) return false;
    return a.kind != LeafKind::Constant || a.value == b.value;
  }
  return a.op == b.op && same_tree(*a.left, *b.left) && same_tree(*a.right, *b.right);
}

double eval_node(const Expression::Node& n, double g_p, double g_c, double a) noexcept {
  if (n.leaf) {
    switch (n.kind) {
      case LeafKind::NeighborGray: return g_p;
      case LeafKind::CenterGray: return g_c;
      case LeafKind::OffsetTerm: return a;
      case LeafKind::Constant: return n.value;
    }
    return 0.0;
  }
  const double l = eval_node(*n.left, g_p, g_c, a);
  const double r = eval_node(*n.right, g_p, g_c, a);
  return apply_op(n.op, l, r);
}

}  // namespace

bool Expression::contains(LeafKind kind) const noexcept { return contains_kind(*root_, kind); }

OperatorAssignment Expression::operators() const {
  OperatorAssignment out;
  out.reserve(operator_count());
  collect_ops(*root_, out);
  return out;
}

namespace {

std::shared_ptr<const Expression::Node> rebuild(const std::shared_ptr<const Expression::Node>& n,
                                                const OperatorAssignment& codes, std::size_t& slot) {
  if (n->leaf) return n;
  auto copy = std::make_shared<Expression::Node>(*n);
  copy->op = static_cast<Op>(codes[slot++]);
  copy->left = rebuild(n->left, codes, slot);
  copy->right = rebuild(n->right, codes, slot);
  return copy;
}

}  // namespace

Expression Expression::with_operators(const OperatorAssignment& codes) const {
  if (codes.size() != operator_count()) {
    throw InvalidArgument("operator assignment has " + std::to_string(codes.size()) + " codes, expression has " +
                          std::to_string(operator_count()) + " operators");
  }
  for (auto c : codes) {
    if (c > 3) throw InvalidArgument("operator code out of range: " + std::to_string(c));
  }
  std::size_t slot = 0;
  return Expression(rebuild(root_, codes, slot));
}

bool operator==(const Expression& a, const Expression& b) noexcept { return same_tree(*a.root_, *b.root_); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Neighbor, Center, Offset, Number, Plus, Minus, Star, Slash, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  double value = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    const std::size_t at = i;
    switch (c) {
      case '+': out.push_back({Tok::Plus, at}); ++i; continue;
      case '-': out.push_back({Tok::Minus, at}); ++i; continue;
      case '*': out.push_back({Tok::Star, at}); ++i; continue;
      case '/': out.push_back({Tok::Slash, at}); ++i; continue;
      case '(': out.push_back({Tok::LParen, at}); ++i; continue;
      case ')': out.push_back({Tok::RParen, at}); ++i; continue;
      default: break;
    }
    // U+2212 MINUS SIGN
    if (s.substr(i, 3) == "\xE2\x88\x92") {
      out.push_back({Tok::Minus, at});
      i += 3;
      continue;
    }
    if (s.substr(i, 3) == "g_p" || s.substr(i, 3) == "g_c") {
      const bool more = i + 3 < s.size() && (std::isalnum(static_cast<unsigned char>(s[i + 3])) || s[i + 3] == '_');
      if (!more) {
        out.push_back({s[i + 2] == 'p' ? Tok::Neighbor : Tok::Center, at});
        i += 3;
        continue;
      }
    }
    if (c == 'a') {
      const bool more = i + 1 < s.size() && (std::isalnum(static_cast<unsigned char>(s[i + 1])) || s[i + 1] == '_');
      if (!more) {
        out.push_back({Tok::Offset, at});
        ++i;
        continue;
      }
    }
    if (std::isdigit(c) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      double value = 0.0;
      const auto res = std::from_chars(s.data() + i, s.data() + j, value);
      if (res.ec != std::errc() || res.ptr != s.data() + j || !std::isfinite(value)) {
        throw SyntaxError("malformed numeric literal", at);
      }
      out.push_back({Tok::Number, at, value});
      i = j;
      continue;
    }
    throw SyntaxError("unknown token", at);
  }
  out.push_back({Tok::End, s.size()});
  return out;
}

// expr   := term (('+' | '-') term)*
// term   := factor (('*' | '/') factor)*
// factor := leaf | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Expression parse_all() {
    if (peek().kind == Tok::End) throw SyntaxError("empty equation", peek().offset);
    Expression e = parse_expr();
    const Token& t = peek();
    if (t.kind == Tok::RParen) throw SyntaxError("unbalanced ')'", t.offset);
    if (t.kind != Tok::End) throw SyntaxError("unexpected token", t.offset);
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  Expression parse_expr() {
    Expression lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Op op = next().kind == Tok::Plus ? Op::Add : Op::Sub;
      lhs = Expression::binary(op, lhs, parse_term());
    }
    return lhs;
  }

  Expression parse_term() {
    Expression lhs = parse_factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Op op = next().kind == Tok::Star ? Op::Mul : Op::Div;
      lhs = Expression::binary(op, lhs, parse_factor());
    }
    return lhs;
  }

  Expression parse_factor() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Neighbor: return Expression::neighbor();
      case Tok::Center: return Expression::center();
      case Tok::Offset: return Expression::offset();
      case Tok::Number: return Expression::constant(t.value);
      case Tok::LParen: {
        Expression inner = parse_expr();
        const Token& close = peek();
        if (close.kind != Tok::RParen) {
          if (close.kind == Tok::End) throw SyntaxError("unbalanced '('", t.offset);
          throw SyntaxError("expected ')'", close.offset);
        }
        ++pos_;
        return inner;
      }
      case Tok::End: throw SyntaxError("dangling operator", t.offset);
      case Tok::RParen: throw SyntaxError("unexpected ')'", t.offset);
      default: throw SyntaxError("expected operand", t.offset);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void render_node(const Expression::Node& n, std::string& out) {
  if (n.leaf) {
    switch (n.kind) {
      case LeafKind::NeighborGray: out += "g_p"; return;
      case LeafKind::CenterGray: out += "g_c"; return;
      case LeafKind::OffsetTerm: out += "a"; return;
      case LeafKind::Constant: {
        std::array<char, 64> buf{};
        const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
        out.append(buf.data(), res.ptr);
        return;
      }
    }
    return;
  }
  out += '(';
  render_node(*n.left, out);
  out += ' ';
  out += op_symbol(n.op);
  out += ' ';
  render_node(*n.right, out);
  out += ')';
}

}  // namespace

Expression parse(std::string_view text) { return Parser(tokenize(text)).parse_all(); }

std::string render(const Expression& e) {
  std::string out;
  render_node(e.root(), out);
  return out;
}

double evaluate(const Expression& e, double g_p, double g_c, double a) noexcept {
  return eval_node(e.root(), g_p, g_c, a);
}

// ---------------------------------------------------------------------------
// CompiledExpr

CompiledExpr::CompiledExpr(const Expression& e) {
  std::size_t depth = 0;
  auto emit = [&](auto&& self, const Expression::Node& n) -> void {
    if (n.leaf) {
      switch (n.kind) {
        case LeafKind::NeighborGray: program_.push_back({Code::PushNeighbor, 0.0}); break;
        case LeafKind::CenterGray: program_.push_back({Code::PushCenter, 0.0}); break;
        case LeafKind::OffsetTerm: program_.push_back({Code::PushOffset, 0.0}); break;
        case LeafKind::Constant: program_.push_back({Code::PushConst, n.value}); break;
      }
      max_depth_ = std::max(max_depth_, ++depth);
      return;
    }
    self(self, *n.left);
    self(self, *n.right);
    program_.push_back({static_cast<Code>(static_cast<int>(Code::Add) + static_cast<int>(n.op)), 0.0});
    --depth;
  };
  emit(emit, e.root());
}

double CompiledExpr::operator()(double g_p, double g_c, double a) const noexcept {
  constexpr std::size_t kInline = 32;
  double small[kInline];
  small[0] = 0.0;
  std::vector<double> big;
  double* stack = small;
  if (max_depth_ > kInline) {
    big.resize(max_depth_);
    stack = big.data();
  }
  std::size_t top = 0;
  for (const Instr& in : program_) {
    switch (in.code) {
      case Code::PushNeighbor: stack[top++] = g_p; break;
      case Code::PushCenter: stack[top++] = g_c; break;
      case Code::PushOffset: stack[top++] = a; break;
      case Code::PushConst: stack[top++] = in.value; break;
      case Code::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
      case Code::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
      case Code::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
      case Code::Div: --top; stack[top - 1] = protected_div(stack[top - 1], stack[top]); break;
    }
  }
  return stack[0];
}

// ---------------------------------------------------------------------------
// Mutations

std::vector<OperatorAssignment> enumerate_assignments(const OperatorAssignment& identity, std::size_t cap) {
  if (cap < 1) throw InvalidArgument("mutation cap must be >= 1");
  const std::size_t eta = identity.size();
  // 4^eta saturating at cap
  std::size_t total = 1;
  for (std::size_t i = 0; i < eta && total < cap; ++i) total *= 4;
  const std::size_t count = std::min(total, cap);

  std::vector<OperatorAssignment> out;
  out.reserve(count);
  OperatorAssignment codes(eta, 0);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(codes);
    for (std::size_t slot = eta; slot-- > 0;) {
      if (++codes[slot] < 4) break;
      codes[slot] = 0;
    }
  }
  if (std::find(out.begin(), out.end(), identity) == out.end()) {
    out.back() = identity;
  }
  return out;
}

std::vector<Expression> enumerate_mutations(const Expression& e, std::size_t cap) {
  std::vector<Expression> out;
  for (const auto& codes : enumerate_assignments(e.operators(), cap)) out.push_back(e.with_operators(codes));
  return out;
}

std::vector<Expression> parse_corpus(std::string_view text) {
  std::vector<Expression> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      try {
        out.push_back(parse(line));
      } catch (const SyntaxError& err) {
        throw DataError("line " + std::to_string(line_no) + ": " + err.what());
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace lbpforge
