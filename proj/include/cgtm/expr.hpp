#pragma once

/**
 * @file expr.hpp
 * @brief Closed-form component expressions over base coordinates.
 *
 * Grammar (EBNF), whitespace-insensitive:
 *
 *   expr     = term , { ("+" | "-") , term } ;
 *   term     = unary , { ("*" | "/") , unary } ;
 *   unary    = "-" , unary | "+" , unary | power ;
 *   power    = primary , [ "^" , exponent ] ;
 *   exponent = "-" , exponent | power ;            (right-associative)
 *   primary  = number | identifier | function , "(" , expr , ")" | "(" , expr , ")" ;
 *   function = "exp" | "log" | "sqrt" | "sin" | "cos" | "tan"
 *            | "sinh" | "cosh" | "tanh" | "abs" ;
 *
 * Identifiers are coordinates x1..xn, coordinate aliases, or declared
 * parameters. Exponents must not depend on coordinates.
 */

#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "cgtm/errors.hpp"
#include "cgtm/jet.hpp"

namespace cgtm {

using ParamValues = std::map<std::string, double>;

enum class BinaryOp { Add, Sub, Mul, Div };
enum class Function { Exp, Log, Sqrt, Sin, Cos, Tan, Sinh, Cosh, Tanh, Abs };

inline std::string_view function_name(Function f) {
    switch (f) {
        case Function::Exp: return "exp";
        case Function::Log: return "log";
        case Function::Sqrt: return "sqrt";
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Tan: return "tan";
        case Function::Sinh: return "sinh";
        case Function::Cosh: return "cosh";
        case Function::Tanh: return "tanh";
        case Function::Abs: return "abs";
    }
    return "?";
}

inline std::optional<Function> function_from_name(std::string_view s) {
    for (Function f : {Function::Exp, Function::Log, Function::Sqrt, Function::Sin, Function::Cos, Function::Tan,
                       Function::Sinh, Function::Cosh, Function::Tanh, Function::Abs})
        if (function_name(f) == s) return f;
    return std::nullopt;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
    double value;
};
struct Variable {
    int index;  // zero-based coordinate index
};
struct Parameter {
    std::string name;
};
struct Negate {
    NodePtr operand;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs, rhs;
};
struct Power {
    NodePtr base, exponent;
};
struct Call {
    Function fn;
    NodePtr arg;
};

struct Node {
    std::variant<Number, Variable, Parameter, Negate, Binary, Power, Call> data;
};

/// Immutable expression tree together with the context it was parsed in.
class Expression {
public:
    Expression() = default;
    Expression(NodePtr root, int dim, std::vector<std::string> params)
        : root_(std::move(root)), dim_(dim), params_(std::move(params)) {}

    const NodePtr& root() const { return root_; }
    int dim() const { return dim_; }
    const std::vector<std::string>& params() const { return params_; }
    bool empty() const { return !root_; }

private:
    NodePtr root_;
    int dim_ = 0;
    std::vector<std::string> params_;
};

// ---------------------------------------------------------------------------
// Structural comparison and printing
// ---------------------------------------------------------------------------

inline bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->data.index() != b->data.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->data);
            if constexpr (std::is_same_v<T, Number>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, Variable>) return x.index == y.index;
            else if constexpr (std::is_same_v<T, Parameter>) return x.name == y.name;
            else if constexpr (std::is_same_v<T, Negate>) return structurally_equal(x.operand, y.operand);
            else if constexpr (std::is_same_v<T, Binary>)
                return x.op == y.op && structurally_equal(x.lhs, y.lhs) && structurally_equal(x.rhs, y.rhs);
            else if constexpr (std::is_same_v<T, Power>)
                return structurally_equal(x.base, y.base) && structurally_equal(x.exponent, y.exponent);
            else return x.fn == y.fn && structurally_equal(x.arg, y.arg);
        },
        a->data);
}

inline bool operator==(const Expression& a, const Expression& b) {
    return structurally_equal(a.root(), b.root());
}

namespace detail {

inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline int precedence(const Node& n) {
    if (const auto* b = std::get_if<Binary>(&n.data))
        return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
    if (std::holds_alternative<Negate>(n.data)) return 3;
    if (std::holds_alternative<Power>(n.data)) return 4;
    if (const auto* num = std::get_if<Number>(&n.data)) return num->value < 0 ? 3 : 5;
    return 5;
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(n, out);
    if (wrap) out += ')';
}

inline void print(const Node& n, std::string& out) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                out += format_number(x.value);
            } else if constexpr (std::is_same_v<T, Variable>) {
                out += "x" + std::to_string(x.index + 1);
            } else if constexpr (std::is_same_v<T, Parameter>) {
                out += x.name;
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print_wrapped(*x.operand, precedence(*x.operand) < 3, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                const int p = precedence(n);
                print_wrapped(*x.lhs, precedence(*x.lhs) < p, out);
                static constexpr const char* ops[] = {"+", "-", "*", "/"};
                out += ops[static_cast<int>(x.op)];
                print_wrapped(*x.rhs, precedence(*x.rhs) <= p, out);
            } else if constexpr (std::is_same_v<T, Power>) {
                print_wrapped(*x.base, precedence(*x.base) <= 4, out);
                out += '^';
                // the exponent grammar admits a leading unary minus or another power
                const int pe = precedence(*x.exponent);
                print_wrapped(*x.exponent, pe < 3, out);
            } else {
                out += function_name(x.fn);
                out += '(';
                print(*x.arg, out);
                out += ')';
            }
        },
        n.data);
}

}  // namespace detail

inline std::string to_string(const Expression& e) {
    std::string out;
    if (e.root()) detail::print(*e.root(), out);
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int dim, const std::vector<std::string>& params,
           const std::vector<std::string>& aliases)
        : text_(text), dim_(dim), params_(params), aliases_(aliases) {}

    NodePtr parse() {
        skip();
        if (pos_ >= text_.size()) fail({"number", "identifier", "(", "-"});
        NodePtr e = expr();
        skip();
        if (pos_ < text_.size()) fail({"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    static NodePtr make(auto&& v) { return std::make_shared<const Node>(Node{std::forward<decltype(v)>(v)}); }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
        throw SyntaxError(pos_, std::move(expected), found);
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make(Binary{BinaryOp::Add, lhs, term()});
            else if (accept('-')) lhs = make(Binary{BinaryOp::Sub, lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make(Binary{BinaryOp::Mul, lhs, unary()});
            else if (accept('/')) lhs = make(Binary{BinaryOp::Div, lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Negate{unary()});
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        skip();
        if (accept('^')) {
            const std::size_t at = pos_;
            NodePtr e = exponent();
            if (depends_on_coordinates(*e)) {
                pos_ = at;
                fail({"constant exponent"});
            }
            return make(Power{base, e});
        }
        return base;
    }

    NodePtr exponent() {
        if (accept('-')) return make(Negate{exponent()});
        return power();
    }

    static bool depends_on_coordinates(const Node& n) {
        return std::visit(
            [](const auto& x) -> bool {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Variable>) return true;
                else if constexpr (std::is_same_v<T, Negate>) return depends_on_coordinates(*x.operand);
                else if constexpr (std::is_same_v<T, Binary>)
                    return depends_on_coordinates(*x.lhs) || depends_on_coordinates(*x.rhs);
                else if constexpr (std::is_same_v<T, Power>)
                    return depends_on_coordinates(*x.base) || depends_on_coordinates(*x.exponent);
                else if constexpr (std::is_same_v<T, Call>) return depends_on_coordinates(*x.arg);
                else return false;
            },
            n.data);
    }

    NodePtr primary() {
        skip();
        if (pos_ >= text_.size()) fail({"number", "identifier", "("});
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail({")"});
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail({"number", "identifier", "("});
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail({"number"});
        }
        return make(Number{v});
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        skip();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            auto fn = function_from_name(name);
            if (!fn) throw UnknownIdentifier(name, start);
            ++pos_;
            NodePtr arg = expr();
            if (!accept(')')) fail({")"});
            return make(Call{*fn, arg});
        }
        if (name.size() > 1 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos && name[1] != '0') {
            const int k = std::stoi(name.substr(1));
            if (k >= 1 && k <= dim_) return make(Variable{k - 1});
            throw UnknownIdentifier(name, start);
        }
        for (std::size_t i = 0; i < aliases_.size(); ++i)
            if (aliases_[i] == name && static_cast<int>(i) < dim_) return make(Variable{static_cast<int>(i)});
        for (const auto& p : params_)
            if (p == name) return make(Parameter{name});
        throw UnknownIdentifier(name, start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int dim_;
    const std::vector<std::string>& params_;
    const std::vector<std::string>& aliases_;
};

}  // namespace detail

/// Parse `text` over coordinates x1..x<dim> (plus optional aliases) and named parameters.
inline Expression parse(std::string_view text, int dim, const std::vector<std::string>& params = {},
                        const std::vector<std::string>& aliases = {}) {
    detail::Parser parser(text, dim, params, aliases);
    return Expression(parser.parse(), dim, params);
}

// ---------------------------------------------------------------------------
// Evaluation over doubles or jets
// ---------------------------------------------------------------------------

namespace detail {

inline double value_of(double v) { return v; }
template <int N>
double value_of(const Jet<N>& j) {
    return j.value();
}

template <class S>
S constant_like(const S& like, double v) {
    if constexpr (std::is_same_v<S, double>) return v;
    else return S(like.nvars(), v);
}

template <class S>
S integer_power(const S& base, long long e) {
    if constexpr (std::is_same_v<S, double>) {
        if (e < 0) return 1.0 / integer_power(base, -e);
        double r = 1.0, b = base;
        while (e > 0) {
            if (e & 1) r *= b;
            e >>= 1;
            if (e) b *= b;
        }
        return r;
    } else {
        return pow_int(base, e);
    }
}

template <class S>
struct Evaluator {
    std::span<const S> vars;
    const ParamValues& params;

    [[noreturn]] void domain(const Node& n, const std::string& why) const {
        std::string sub;
        print(n, sub);
        std::string point;
        for (std::size_t i = 0; i < vars.size(); ++i)
            point += (i ? ", " : "") + format_number(value_of(vars[i]));
        throw DomainError(why + " in '" + sub + "' at (" + point + ")");
    }

    double param(const std::string& name, const Node& n) const {
        auto it = params.find(name);
        if (it == params.end()) domain(n, "unbound parameter " + name);
        return it->second;
    }

    S operator()(const Node& n) const {
        return std::visit(
            [&](const auto& x) -> S {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Number>) {
                    return constant_like(vars.front(), x.value);
                } else if constexpr (std::is_same_v<T, Variable>) {
                    return vars[x.index];
                } else if constexpr (std::is_same_v<T, Parameter>) {
                    return constant_like(vars.front(), param(x.name, n));
                } else if constexpr (std::is_same_v<T, Negate>) {
                    return -(*this)(*x.operand);
                } else if constexpr (std::is_same_v<T, Binary>) {
                    S a = (*this)(*x.lhs);
                    S b = (*this)(*x.rhs);
                    switch (x.op) {
                        case BinaryOp::Add: return a + b;
                        case BinaryOp::Sub: return a - b;
                        case BinaryOp::Mul: return a * b;
                        case BinaryOp::Div:
                            if (value_of(b) == 0.0) domain(n, "division by zero");
                            return a / b;
                    }
                    return a;
                } else if constexpr (std::is_same_v<T, Power>) {
                    S base = (*this)(*x.base);
                    Evaluator<double> constant{std::span<const double>(&zero, 1), params};
                    const double e = constant(*x.exponent);
                    if (std::nearbyint(e) == e && std::abs(e) < 1e9) {
                        if (e < 0 && value_of(base) == 0.0) domain(n, "division by zero");
                        return integer_power(base, static_cast<long long>(e));
                    }
                    if (!(value_of(base) > 0.0)) domain(n, "real power of non-positive base");
                    using std::exp;
                    using std::log;
                    if constexpr (std::is_same_v<S, double>) return std::pow(base, e);
                    else return pow_real(base, e);
                } else {
                    S a = (*this)(*x.arg);
                    const double v = value_of(a);
                    using std::abs, std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt,
                        std::tan, std::tanh;
                    switch (x.fn) {
                        case Function::Exp: return exp(a);
                        case Function::Log:
                            if (!(v > 0.0)) domain(n, "log of non-positive value");
                            return log(a);
                        case Function::Sqrt:
                            if (v < 0.0 || (v == 0.0 && !std::is_same_v<S, double>))
                                domain(n, "sqrt of non-positive value");
                            return sqrt(a);
                        case Function::Sin: return sin(a);
                        case Function::Cos: return cos(a);
                        case Function::Tan:
                            if (std::abs(std::cos(v)) < 1e-15) domain(n, "tan at a pole");
                            return tan(a);
                        case Function::Sinh: return sinh(a);
                        case Function::Cosh: return cosh(a);
                        case Function::Tanh: return tanh(a);
                        case Function::Abs:
                            if (v == 0.0 && !std::is_same_v<S, double>) domain(n, "abs is not differentiable at 0");
                            return abs(a);
                    }
                    return a;
                }
            },
            n.data);
    }

    static constexpr double zero = 0.0;
};

}  // namespace detail

/// Evaluate over doubles or jets; `vars` supplies every coordinate.
template <class S>
S evaluate(const Expression& e, std::span<const S> vars, const ParamValues& params = {}) {
    if (e.empty()) throw UsageError("evaluating an empty expression");
    if (static_cast<int>(vars.size()) != e.dim())
        throw UsageError("point has " + std::to_string(vars.size()) + " coordinates, expected " +
                         std::to_string(e.dim()));
    if (vars.empty()) throw UsageError("expressions need at least one coordinate");
    detail::Evaluator<S> ev{vars, params};
    return ev(*e.root());
}

inline double evaluate(const Expression& e, const std::vector<double>& point, const ParamValues& params = {}) {
    return evaluate<double>(e, std::span<const double>(point), params);
}

/// Order-3 jet of `e` at `point`: value plus all partials through third order.
inline Jet3 eval_jet(const Expression& e, std::span<const double> point, const ParamValues& params = {}) {
    auto vars = Jet3::variables(point);
    return evaluate<Jet3>(e, std::span<const Jet3>(vars), params);
}

}  // namespace cgtm
