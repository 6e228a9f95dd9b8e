#include "rearr/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rearr {

namespace {

struct Node {
    virtual ~Node() = default;
    virtual double eval(double r) const = 0;
};
using NodePtr = std::shared_ptr<const Node>;

struct Constant : Node {
    double value;
    explicit Constant(double v) : value(v) {}
    double eval(double) const override { return value; }
};

struct Variable : Node {
    double eval(double r) const override { return r; }
};

struct Unary : Node {
    std::function<double(double)> fn;
    NodePtr arg;
    Unary(std::function<double(double)> f, NodePtr a) : fn(std::move(f)), arg(std::move(a)) {}
    double eval(double r) const override { return fn(arg->eval(r)); }
};

struct Binary : Node {
    std::function<double(double, double)> fn;
    NodePtr lhs, rhs;
    Binary(std::function<double(double, double)> f, NodePtr l, NodePtr r)
        : fn(std::move(f)), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(double r) const override { return fn(lhs->eval(r), rhs->eval(r)); }
};

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != text_.size())
            throw std::invalid_argument("unexpected trailing input in expression: '" +
                                        text_.substr(pos_) + "'");
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expression() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+')) {
                lhs = std::make_shared<Binary>([](double a, double b) { return a + b; }, lhs, term());
            } else if (consume('-')) {
                lhs = std::make_shared<Binary>([](double a, double b) { return a - b; }, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (consume('*')) {
                lhs = std::make_shared<Binary>([](double a, double b) { return a * b; }, lhs, unary());
            } else if (consume('/')) {
                lhs = std::make_shared<Binary>([](double a, double b) { return a / b; }, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (consume('-')) {
            NodePtr a = unary();
            return std::make_shared<Unary>([](double x) { return -x; }, a);
        }
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) {
            NodePtr exponent = unary();  // right associative
            return std::make_shared<Binary>(
                [](double a, double b) { return std::pow(a, b); }, base, exponent);
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw std::invalid_argument("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            if (!consume(')')) throw std::invalid_argument("missing ')' in expression");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw std::invalid_argument(std::string("unexpected character '") + c + "' in expression");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                text_[pos_] == 'e' || text_[pos_] == 'E' ||
                ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                 (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        try {
            return std::make_shared<Constant>(std::stod(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed number in expression");
        }
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "r" || name == "t" || name == "x") return std::make_shared<Variable>();
        if (name == "pi") return std::make_shared<Constant>(M_PI);
        if (name == "e") return std::make_shared<Constant>(M_E);

        if (!consume('(')) throw std::invalid_argument("unknown identifier '" + name + "'");
        std::vector<NodePtr> args;
        if (peek() != ')') {
            args.push_back(expression());
            while (consume(',')) args.push_back(expression());
        }
        if (!consume(')')) throw std::invalid_argument("missing ')' after '" + name + "('");

        auto unary_fn = [&](double (*f)(double)) {
            if (args.size() != 1)
                throw std::invalid_argument("'" + name + "' expects one argument");
            return std::make_shared<Unary>(f, args[0]);
        };
        auto binary_fn = [&](double (*f)(double, double)) {
            if (args.size() != 2)
                throw std::invalid_argument("'" + name + "' expects two arguments");
            return std::make_shared<Binary>(f, args[0], args[1]);
        };
        if (name == "exp") return unary_fn([](double x) { return std::exp(x); });
        if (name == "log") return unary_fn([](double x) { return std::log(x); });
        if (name == "log1p") return unary_fn([](double x) { return std::log1p(x); });
        if (name == "sqrt") return unary_fn([](double x) { return std::sqrt(x); });
        if (name == "abs") return unary_fn([](double x) { return std::fabs(x); });
        if (name == "sin") return unary_fn([](double x) { return std::sin(x); });
        if (name == "cos") return unary_fn([](double x) { return std::cos(x); });
        if (name == "tanh") return unary_fn([](double x) { return std::tanh(x); });
        if (name == "pow") return binary_fn([](double a, double b) { return std::pow(a, b); });
        if (name == "min") return binary_fn([](double a, double b) { return std::fmin(a, b); });
        if (name == "max") return binary_fn([](double a, double b) { return std::fmax(a, b); });
        throw std::invalid_argument("unknown function '" + name + "'");
    }
};

}  // namespace

std::function<double(double)> compile_expression(const std::string& text) {
    Parser parser(text);
    NodePtr root = parser.parse();
    return [root](double r) { return root->eval(r); };
}

}  // namespace rearr
