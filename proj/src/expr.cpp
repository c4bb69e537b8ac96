#include "carnot/expr.hpp"

#include <cctype>
#include <cmath>
#include <memory>

namespace carnot {

namespace {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Coord, Add, Sub, Mul, Div, Neg, Pow, Sqrt };
    Kind kind;
    double number = 0.0;
    int coord = -1;
    NodePtr a, b;
};

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("expression error at offset " + std::to_string(pos_) + ": " + msg);
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        while (true) {
            if (eat('+')) {
                e = make(Node::Kind::Add, e, term());
            } else if (eat('-')) {
                e = make(Node::Kind::Sub, e, term());
            } else {
                return e;
            }
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        while (true) {
            if (eat('*')) {
                e = make(Node::Kind::Mul, e, unary());
            } else if (eat('/')) {
                e = make(Node::Kind::Div, e, unary());
            } else {
                return e;
            }
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Node::Kind::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    static bool contains_coordinate(const Node& n) {
        if (n.kind == Node::Kind::Coord) return true;
        if (n.a && contains_coordinate(*n.a)) return true;
        if (n.b && contains_coordinate(*n.b)) return true;
        return false;
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) {
            NodePtr ex = unary();  // right-associative
            if (contains_coordinate(*ex)) fail("exponents must be constant expressions");
            return make(Node::Kind::Pow, base, ex);
        }
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("expected operand");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        std::size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Number;
        try {
            n->number = std::stod(s_.substr(pos_, end - pos_));
        } catch (const std::exception&) {
            fail("bad numeric literal");
        }
        pos_ = end;
        return n;
    }

    NodePtr ident() {
        std::size_t end = pos_;
        while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            ++end;
        std::string name = s_.substr(pos_, end - pos_);
        pos_ = end;
        if (name == "sqrt") {
            if (!eat('(')) fail("sqrt requires parentheses");
            NodePtr arg = expr();
            if (!eat(')')) fail("expected ')'");
            return make(Node::Kind::Sqrt, arg);
        }
        auto n = std::make_shared<Node>();
        if (name == "pi") {
            n->kind = Node::Kind::Number;
            n->number = M_PI;
            return n;
        }
        if (name == "e") {
            n->kind = Node::Kind::Number;
            n->number = M_E;
            return n;
        }
        if (name.size() >= 2 && name[0] == 'x') {
            int idx = 0;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) fail("unknown identifier '" + name + "'");
                idx = idx * 10 + (name[i] - '0');
            }
            if (idx < 1 || idx > dim_)
                fail("coordinate " + name + " out of range for dimension " + std::to_string(dim_));
            n->kind = Node::Kind::Coord;
            n->coord = idx - 1;
            return n;
        }
        fail("unknown identifier '" + name + "'");
    }

    const std::string& s_;
    int dim_;
    std::size_t pos_ = 0;
};

Jet3 eval(const Node& nd, const Vec& x) {
    const int n = int(x.size());
    switch (nd.kind) {
        case Node::Kind::Number: return Jet3::constant(n, nd.number);
        case Node::Kind::Coord: return Jet3::variable(n, nd.coord, x[nd.coord]);
        case Node::Kind::Add: return eval(*nd.a, x) + eval(*nd.b, x);
        case Node::Kind::Sub: return eval(*nd.a, x) - eval(*nd.b, x);
        case Node::Kind::Mul: return eval(*nd.a, x) * eval(*nd.b, x);
        case Node::Kind::Div: return eval(*nd.a, x) / eval(*nd.b, x);
        case Node::Kind::Neg: return -eval(*nd.a, x);
        case Node::Kind::Sqrt: return sqrt(eval(*nd.a, x));
        case Node::Kind::Pow: {
            Jet3 base = eval(*nd.a, x);
            // integer literal exponents stay exact under repeated multiplication
            if (nd.b->kind == Node::Kind::Number) {
                double e = nd.b->number;
                if (e == std::floor(e) && std::abs(e) < 64.0) return pow(base, int(e));
                return pow(base, e);
            }
            Jet3 ex = eval(*nd.b, x);
            if (!ex.d1.isZero(0.0)) throw ParseError("exponents must be constant expressions");
            return pow(base, ex.v);
        }
    }
    throw ParseError("corrupt expression tree");
}

}  // namespace

ScalarField parse_surface_expression(const std::string& text, int dim) {
    Parser p(text, dim);
    NodePtr root = p.parse();
    return ScalarField::analytic(dim, [root](const Vec& x) { return eval(*root, x); });
}

}  // namespace carnot
