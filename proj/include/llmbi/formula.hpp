#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Expression language for the likelihood mean: numeric literals, identifiers,
// unary minus, + - * / and parentheses. Nothing else.
namespace llmbi::formula {

enum class TokenKind { Identifier, Number, Plus, Minus, Star, Slash, LParen, RParen };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
  std::size_t position = 0;

  bool operator==(const Token&) const = default;
};

/// Throws Error(IllegalCharacter) with the offending offset. `^` and `**`
/// get a message naming exponentiation as unsupported.
std::vector<Token> tokenize(std::string_view source);

enum class BinaryOp { Add, Sub, Mul, Div };

class Expr;

struct Number {
  double value;
};
struct Variable {
  std::string name;
};
struct Negate {
  std::shared_ptr<const Expr> operand;
};
struct Binary {
  BinaryOp op;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};

/// Immutable expression node. Subtrees are shared, never mutated.
class Expr {
 public:
  using Node = std::variant<Number, Variable, Negate, Binary>;

  explicit Expr(Node node) : node_(std::move(node)) {}

  const Node& node() const { return node_; }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node_);
  }

 private:
  Node node_;
};

using Ast = std::shared_ptr<const Expr>;

Ast number(double value);
Ast variable(std::string name);
Ast negate(Ast operand);
Ast binary(BinaryOp op, Ast lhs, Ast rhs);

/// Structural equality; literals compare by value.
bool equal(const Ast& a, const Ast& b);

Ast parse(std::span<const Token> tokens);
Ast parse(std::string_view source);

/// Canonical infix rendering with the minimal parentheses needed to
/// reparse to the same tree (for trees with non-negative literals).
std::string to_string(const Ast& ast);

std::set<std::string> free_vars(const Ast& ast);

double evaluate(const Ast& ast, const std::map<std::string, double>& env);

/// Symbolic partial derivative, simplified.
Ast differentiate(const Ast& ast, std::string_view var);

/// Constant folding plus 0+e, e+0, e-0, 1*e, e*1, 0*e, e*0, e/1, --e.
Ast simplify(const Ast& ast);

/// Flattened stack program over indexed slots, used in hot loops where a
/// map lookup per variable would dominate. Evaluation never throws;
/// division by zero yields a non-finite value the caller must check.
class CompiledFormula {
 public:
  CompiledFormula() = default;

  /// Throws Error(UnboundVariable) if the tree names a variable not in
  /// `slot_names`.
  CompiledFormula(const Ast& ast, std::span<const std::string> slot_names);

  double operator()(std::span<const double> slots) const;

 private:
  enum class Op : unsigned char { Push, Load, Neg, Add, Sub, Mul, Div };
  struct Instr {
    Op op;
    std::size_t slot;
    double value;
  };
  void emit(const Ast& ast, std::span<const std::string> slot_names);

  std::vector<Instr> program_;
  std::size_t max_stack_ = 0;
};

}  // namespace llmbi::formula
