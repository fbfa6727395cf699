#include "llmbi/formula.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "llmbi/error.hpp"
#include "llmbi/numfmt.hpp"

namespace llmbi::formula {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
  }
  return "?";
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    const char c = source[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_char(source[j])) ++j;
      tokens.push_back({TokenKind::Identifier, std::string(source.substr(i, j - i)), 0.0, i});
      i = j;
      continue;
    }
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      std::size_t j = i;
      while (j < n && is_digit(source[j])) ++j;
      if (j < n && source[j] == '.') {
        ++j;
        while (j < n && is_digit(source[j])) ++j;
      }
      if (j < n && (source[j] == 'e' || source[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (source[k] == '+' || source[k] == '-')) ++k;
        if (k < n && is_digit(source[k])) {
          while (k < n && is_digit(source[k])) ++k;
          j = k;
        }
      }
      const std::string text(source.substr(i, j - i));
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::IllegalCharacter,
                    "numeric literal '" + text + "' at position " + std::to_string(i) +
                        " is not a finite number",
                    i);
      }
      tokens.push_back({TokenKind::Number, text, value, i});
      i = j;
      continue;
    }
    TokenKind kind{};
    switch (c) {
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '/': kind = TokenKind::Slash; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case '*':
        if (i + 1 < n && source[i + 1] == '*') {
          throw Error(ErrorCode::IllegalCharacter,
                      "exponentiation operator '**' at position " + std::to_string(i) +
                          " is not supported",
                      i);
        }
        kind = TokenKind::Star;
        break;
      case '^':
        throw Error(ErrorCode::IllegalCharacter,
                    "exponentiation operator '^' at position " + std::to_string(i) +
                        " is not supported",
                    i);
      default:
        throw Error(ErrorCode::IllegalCharacter,
                    std::string("unexpected character '") + c + "' at position " +
                        std::to_string(i),
                    i);
    }
    tokens.push_back({kind, std::string(1, c), 0.0, i});
    ++i;
  }
  return tokens;
}

Ast number(double value) { return std::make_shared<const Expr>(Number{value}); }
Ast variable(std::string name) { return std::make_shared<const Expr>(Variable{std::move(name)}); }
Ast negate(Ast operand) { return std::make_shared<const Expr>(Negate{std::move(operand)}); }
Ast binary(BinaryOp op, Ast lhs, Ast rhs) {
  return std::make_shared<const Expr>(Binary{op, std::move(lhs), std::move(rhs)});
}

bool equal(const Ast& a, const Ast& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node().index() != b->node().index()) return false;
  if (auto* x = a->as<Number>()) return x->value == b->as<Number>()->value;
  if (auto* x = a->as<Variable>()) return x->name == b->as<Variable>()->name;
  if (auto* x = a->as<Negate>()) return equal(x->operand, b->as<Negate>()->operand);
  const auto* x = a->as<Binary>();
  const auto* y = b->as<Binary>();
  return x->op == y->op && equal(x->lhs, y->lhs) && equal(x->rhs, y->rhs);
}

namespace {

// expr  := term (('+'|'-') term)*
// term  := unary (('*'|'/') unary)*
// unary := '-' unary | primary
// primary := NUMBER | IDENT | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

  Ast parse_all() {
    if (tokens_.empty()) throw Error(ErrorCode::UnexpectedEnd, "empty formula");
    Ast result = expr();
    if (pos_ < tokens_.size()) unexpected(tokens_[pos_]);
    return result;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  [[noreturn]] void unexpected(const Token& t) const {
    throw Error(ErrorCode::UnexpectedToken,
                "unexpected '" + t.text + "' at position " + std::to_string(t.position),
                t.position);
  }

  [[noreturn]] void unexpected_end() const {
    throw Error(ErrorCode::UnexpectedEnd, "formula ends where an operand was expected");
  }

  Ast expr() {
    Ast lhs = term();
    while (const Token* t = peek()) {
      if (t->kind != TokenKind::Plus && t->kind != TokenKind::Minus) break;
      ++pos_;
      lhs = binary(t->kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs, term());
    }
    return lhs;
  }

  Ast term() {
    Ast lhs = unary();
    while (const Token* t = peek()) {
      if (t->kind != TokenKind::Star && t->kind != TokenKind::Slash) break;
      ++pos_;
      lhs = binary(t->kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div, lhs, unary());
    }
    return lhs;
  }

  Ast unary() {
    const Token* t = peek();
    if (t && t->kind == TokenKind::Minus) {
      ++pos_;
      return negate(unary());
    }
    return primary();
  }

  Ast primary() {
    const Token* t = peek();
    if (!t) unexpected_end();
    ++pos_;
    switch (t->kind) {
      case TokenKind::Number:
        return number(t->number);
      case TokenKind::Identifier: {
        const Token* next = peek();
        if (next && next->kind == TokenKind::LParen) {
          throw Error(ErrorCode::UnexpectedToken,
                      "function call '" + t->text + "(' at position " +
                          std::to_string(next->position) + " is not supported",
                      next->position);
        }
        return variable(t->text);
      }
      case TokenKind::LParen: {
        Ast inner = expr();
        const Token* close = peek();
        if (!close) unexpected_end();
        if (close->kind != TokenKind::RParen) unexpected(*close);
        ++pos_;
        return inner;
      }
      default:
        unexpected(*t);
    }
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
};

int precedence(const Ast& ast) {
  if (const auto* b = ast->as<Binary>()) {
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  }
  if (ast->as<Negate>()) return 3;
  return 4;
}

void print(const Ast& ast, std::string& out) {
  if (const auto* n = ast->as<Number>()) {
    if (n->value < 0 || (n->value == 0 && std::signbit(n->value))) {
      out += "(" + format_double(n->value) + ")";
    } else {
      out += format_double(n->value);
    }
    return;
  }
  if (const auto* v = ast->as<Variable>()) {
    out += v->name;
    return;
  }
  if (const auto* g = ast->as<Negate>()) {
    out += "-";
    const bool wrap = precedence(g->operand) < 3;
    if (wrap) out += "(";
    print(g->operand, out);
    if (wrap) out += ")";
    return;
  }
  const auto* b = ast->as<Binary>();
  const int p = precedence(ast);
  const bool wrap_lhs = precedence(b->lhs) < p;
  const bool wrap_rhs = precedence(b->rhs) <= p;
  if (wrap_lhs) out += "(";
  print(b->lhs, out);
  if (wrap_lhs) out += ")";
  out += " ";
  out += op_symbol(b->op);
  out += " ";
  if (wrap_rhs) out += "(";
  print(b->rhs, out);
  if (wrap_rhs) out += ")";
}

void collect(const Ast& ast, std::set<std::string>& names) {
  if (const auto* v = ast->as<Variable>()) {
    names.insert(v->name);
  } else if (const auto* g = ast->as<Negate>()) {
    collect(g->operand, names);
  } else if (const auto* b = ast->as<Binary>()) {
    collect(b->lhs, names);
    collect(b->rhs, names);
  }
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b;
  }
  return 0.0;
}

bool is_const(const Ast& a, double v) {
  const auto* n = a->as<Number>();
  return n && n->value == v;
}

}  // namespace

Ast parse(std::span<const Token> tokens) { return Parser(tokens).parse_all(); }

Ast parse(std::string_view source) {
  const auto tokens = tokenize(source);
  return parse(tokens);
}

std::string to_string(const Ast& ast) {
  std::string out;
  print(ast, out);
  return out;
}

std::set<std::string> free_vars(const Ast& ast) {
  std::set<std::string> names;
  collect(ast, names);
  return names;
}

double evaluate(const Ast& ast, const std::map<std::string, double>& env) {
  if (const auto* n = ast->as<Number>()) return n->value;
  if (const auto* v = ast->as<Variable>()) {
    auto it = env.find(v->name);
    if (it == env.end()) throw Error(ErrorCode::UnboundVariable, "no value bound for '" + v->name + "'");
    return it->second;
  }
  if (const auto* g = ast->as<Negate>()) return -evaluate(g->operand, env);
  const auto* b = ast->as<Binary>();
  const double result = apply(b->op, evaluate(b->lhs, env), evaluate(b->rhs, env));
  if (!std::isfinite(result)) {
    throw Error(ErrorCode::NonFiniteResult, "'" + to_string(ast) + "' evaluated to a non-finite value");
  }
  return result;
}

Ast simplify(const Ast& ast) {
  if (const auto* g = ast->as<Negate>()) {
    Ast inner = simplify(g->operand);
    if (const auto* n = inner->as<Number>()) return number(-n->value);
    if (const auto* nn = inner->as<Negate>()) return nn->operand;
    return negate(inner);
  }
  const auto* b = ast->as<Binary>();
  if (!b) return ast;
  Ast lhs = simplify(b->lhs);
  Ast rhs = simplify(b->rhs);
  const auto* ln = lhs->as<Number>();
  const auto* rn = rhs->as<Number>();
  if (ln && rn) {
    const double folded = apply(b->op, ln->value, rn->value);
    if (std::isfinite(folded)) return number(folded);
    return binary(b->op, lhs, rhs);
  }
  switch (b->op) {
    case BinaryOp::Add:
      if (is_const(lhs, 0.0)) return rhs;
      if (is_const(rhs, 0.0)) return lhs;
      break;
    case BinaryOp::Sub:
      if (is_const(rhs, 0.0)) return lhs;
      if (is_const(lhs, 0.0)) return simplify(negate(rhs));
      break;
    case BinaryOp::Mul:
      if (is_const(lhs, 0.0) || is_const(rhs, 0.0)) return number(0.0);
      if (is_const(lhs, 1.0)) return rhs;
      if (is_const(rhs, 1.0)) return lhs;
      break;
    case BinaryOp::Div:
      if (is_const(rhs, 1.0)) return lhs;
      break;
  }
  return binary(b->op, lhs, rhs);
}

namespace {

Ast derive(const Ast& ast, std::string_view var) {
  if (ast->as<Number>()) return number(0.0);
  if (const auto* v = ast->as<Variable>()) return number(v->name == var ? 1.0 : 0.0);
  if (const auto* g = ast->as<Negate>()) return negate(derive(g->operand, var));
  const auto* b = ast->as<Binary>();
  Ast du = derive(b->lhs, var);
  Ast dv = derive(b->rhs, var);
  switch (b->op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
      return binary(b->op, du, dv);
    case BinaryOp::Mul:
      return binary(BinaryOp::Add, binary(BinaryOp::Mul, du, b->rhs),
                    binary(BinaryOp::Mul, b->lhs, dv));
    case BinaryOp::Div:
      return binary(BinaryOp::Div,
                    binary(BinaryOp::Sub, binary(BinaryOp::Mul, du, b->rhs),
                           binary(BinaryOp::Mul, b->lhs, dv)),
                    binary(BinaryOp::Mul, b->rhs, b->rhs));
  }
  return number(0.0);
}

}  // namespace

Ast differentiate(const Ast& ast, std::string_view var) { return simplify(derive(ast, var)); }

CompiledFormula::CompiledFormula(const Ast& ast, std::span<const std::string> slot_names) {
  emit(ast, slot_names);
  std::size_t depth = 0;
  for (const auto& ins : program_) {
    switch (ins.op) {
      case Op::Push:
      case Op::Load:
        ++depth;
        break;
      case Op::Neg:
        break;
      default:
        --depth;
    }
    max_stack_ = std::max(max_stack_, depth);
  }
}

void CompiledFormula::emit(const Ast& ast, std::span<const std::string> slot_names) {
  if (const auto* n = ast->as<Number>()) {
    program_.push_back({Op::Push, 0, n->value});
  } else if (const auto* v = ast->as<Variable>()) {
    std::size_t slot = 0;
    while (slot < slot_names.size() && slot_names[slot] != v->name) ++slot;
    if (slot == slot_names.size()) {
      throw Error(ErrorCode::UnboundVariable, "no slot bound for '" + v->name + "'");
    }
    program_.push_back({Op::Load, slot, 0.0});
  } else if (const auto* g = ast->as<Negate>()) {
    emit(g->operand, slot_names);
    program_.push_back({Op::Neg, 0, 0.0});
  } else {
    const auto* b = ast->as<Binary>();
    emit(b->lhs, slot_names);
    emit(b->rhs, slot_names);
    Op op = Op::Add;
    switch (b->op) {
      case BinaryOp::Add: op = Op::Add; break;
      case BinaryOp::Sub: op = Op::Sub; break;
      case BinaryOp::Mul: op = Op::Mul; break;
      case BinaryOp::Div: op = Op::Div; break;
    }
    program_.push_back({op, 0, 0.0});
  }
}

double CompiledFormula::operator()(std::span<const double> slots) const {
  std::array<double, 64> small{};
  std::vector<double> large;
  double* stack = small.data();
  if (max_stack_ > small.size()) {
    large.resize(max_stack_);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const auto& ins : program_) {
    switch (ins.op) {
      case Op::Push: stack[top++] = ins.value; break;
      case Op::Load: stack[top++] = slots[ins.slot]; break;
      case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
      case Op::Add: --top; stack[top - 1] += stack[top]; break;
      case Op::Sub: --top; stack[top - 1] -= stack[top]; break;
      case Op::Mul: --top; stack[top - 1] *= stack[top]; break;
      case Op::Div: --top; stack[top - 1] /= stack[top]; break;
    }
  }
  return top == 0 ? 0.0 : stack[0];
}

}  // namespace llmbi::formula
