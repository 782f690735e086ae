#include "gauss/expr.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "gauss/error.hpp"
#include "gauss/error_model.hpp"

namespace gauss {

// ---------------------------------------------------------------- nodes

NodePtr ExprNode::make_number(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
}

NodePtr ExprNode::make_name(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Name;
    n->name = std::move(name);
    return n;
}

NodePtr ExprNode::make_unary(NodeKind k, NodePtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(operand);
    return n;
}

NodePtr ExprNode::make_binary(NodeKind k, NodePtr l, NodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

NodePtr ExprNode::make_call(Function f, NodePtr arg) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Call;
    n->fn = f;
    n->lhs = std::move(arg);
    return n;
}

bool trees_equal(const ExprNode& a, const ExprNode& b) noexcept {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::Number: return a.number == b.number;
        case NodeKind::Name: return a.name == b.name;
        case NodeKind::Neg: return trees_equal(*a.lhs, *b.lhs);
        case NodeKind::Call: return a.fn == b.fn && trees_equal(*a.lhs, *b.lhs);
        default: return trees_equal(*a.lhs, *b.lhs) && trees_equal(*a.rhs, *b.rhs);
    }
}

std::string_view function_name(Function f) noexcept {
    switch (f) {
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Exp: return "exp";
        case Function::Log: return "log";
    }
    return "?";
}

// ---------------------------------------------------------------- parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string_view text;
    double number = 0.0;
};

std::string_view describe(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "identifier";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::End: return "end of input";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::optional<Function> lookup_function(std::string_view name) {
    if (name == "sin") return Function::Sin;
    if (name == "cos") return Function::Cos;
    if (name == "exp") return Function::Exp;
    if (name == "log") return Function::Log;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    NodePtr parse_all() {
        NodePtr e = parse_sum();
        if (tok_.kind != Tok::End) fail({Tok::Plus, Tok::Minus, Tok::Star, Tok::Slash, Tok::Caret, Tok::End});
        return e;
    }

private:
    // sum := product (('+' | '-') product)*
    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            const NodeKind k = tok_.kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
            advance();
            lhs = ExprNode::make_binary(k, lhs, parse_product());
        }
        return lhs;
    }

    // product := unary (('*' | '/') unary)*
    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            const NodeKind k = tok_.kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
            advance();
            lhs = ExprNode::make_binary(k, lhs, parse_unary());
        }
        return lhs;
    }

    // unary := '-' unary | power
    NodePtr parse_unary() {
        if (tok_.kind == Tok::Minus) {
            advance();
            return ExprNode::make_unary(NodeKind::Neg, parse_unary());
        }
        return parse_power();
    }

    // power := primary ('^' unary)?   (right-associative through unary)
    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (tok_.kind == Tok::Caret) {
            advance();
            return ExprNode::make_binary(NodeKind::Pow, base, parse_unary());
        }
        return base;
    }

    NodePtr parse_primary() {
        switch (tok_.kind) {
            case Tok::Number: {
                auto n = ExprNode::make_number(tok_.number);
                advance();
                return n;
            }
            case Tok::Ident: {
                const Token id = tok_;
                advance();
                if (tok_.kind == Tok::LParen) {
                    const auto fn = lookup_function(id.text);
                    if (!fn)
                        throw Error(ErrorKind::UnknownFunction,
                                    "unknown function '" + std::string(id.text) + "' at position " +
                                        std::to_string(id.pos),
                                    id.pos);
                    advance();
                    NodePtr arg = parse_sum();
                    expect(Tok::RParen);
                    return ExprNode::make_call(*fn, arg);
                }
                if (lookup_function(id.text)) {
                    fail({Tok::LParen});
                }
                return ExprNode::make_name(std::string(id.text));
            }
            case Tok::LParen: {
                advance();
                NodePtr e = parse_sum();
                expect(Tok::RParen);
                return e;
            }
            default: fail({Tok::Number, Tok::Ident, Tok::LParen, Tok::Minus});
        }
    }

    void expect(Tok k) {
        if (tok_.kind != k) fail({k});
        advance();
    }

    [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
        std::string msg = "syntax error at position " + std::to_string(tok_.pos) + ": expected ";
        bool first = true;
        for (Tok t : expected) {
            if (!first) msg += " or ";
            msg += describe(t);
            first = false;
        }
        msg += ", found ";
        msg += tok_.kind == Tok::End ? std::string("end of input") : "'" + std::string(tok_.text) + "'";
        throw Error(ErrorKind::SyntaxError, msg, tok_.pos);
    }

    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            tok_ = {Tok::End, start, {}};
            return;
        }
        const char c = src_[pos_];
        if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
            lex_number(start);
            return;
        }
        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
            tok_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
            return;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            default:
                throw Error(ErrorKind::SyntaxError,
                            "syntax error at position " + std::to_string(start) + ": unexpected character '" +
                                std::string(1, c) + "'",
                            start);
        }
        ++pos_;
        tok_ = {k, start, src_.substr(start, 1)};
    }

    void lex_number(std::size_t start) {
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && digit(src_[p])) {
                pos_ = p;
                while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
            throw Error(ErrorKind::SyntaxError,
                        "syntax error at position " + std::to_string(start) + ": bad number '" +
                            std::string(text) + "'",
                        start);
        tok_ = {Tok::Number, start, text, v};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token tok_{Tok::End, 0, {}};
};

// Binding strength used for printing.
int precedence(const ExprNode& n) {
    switch (n.kind) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

void print_into(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
    if (parens) out += '(';
    print_into(child, out);
    if (parens) out += ')';
}

void print_into(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[64];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.number);
            out.append(buf, ptr);
            return;
        }
        case NodeKind::Name: out += n.name; return;
        case NodeKind::Neg:
            out += '-';
            print_child(*n.lhs, precedence(*n.lhs) < 3, out);
            return;
        case NodeKind::Call:
            out += function_name(n.fn);
            print_child(*n.lhs, true, out);
            return;
        case NodeKind::Pow:
            print_child(*n.lhs, precedence(*n.lhs) <= 4, out);
            out += '^';
            print_child(*n.rhs, precedence(*n.rhs) < 3, out);
            return;
        default: {
            const int p = precedence(n);
            print_child(*n.lhs, precedence(*n.lhs) < p, out);
            switch (n.kind) {
                case NodeKind::Add: out += " + "; break;
                case NodeKind::Sub: out += " - "; break;
                case NodeKind::Mul: out += '*'; break;
                default: out += '/'; break;
            }
            print_child(*n.rhs, precedence(*n.rhs) <= p, out);
        }
    }
}

void collect_names(const ExprNode& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::Name) out.insert(n.name);
    if (n.lhs) collect_names(*n.lhs, out);
    if (n.rhs) collect_names(*n.rhs, out);
}

}  // namespace

ModelExpression ModelExpression::parse(std::string_view source) {
    if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw Error(ErrorKind::SyntaxError, "empty expression", 0);
    Parser p(source);
    return ModelExpression(std::string(source), p.parse_all());
}

std::string print_node(const ExprNode& node) {
    std::string out;
    print_into(node, out);
    return out;
}

std::string ModelExpression::print() const { return print_node(*root_); }

std::set<std::string> ModelExpression::names() const {
    std::set<std::string> out;
    collect_names(*root_, out);
    return out;
}

// ---------------------------------------------------------------- bound form

BoundExpression::BoundExpression(const ModelExpression& expr, std::span<const std::string> slot_names)
    : slot_count_(slot_names.size()) {
    std::map<std::string, std::size_t> slots;
    for (std::size_t i = 0; i < slot_names.size(); ++i) slots.emplace(slot_names[i], i);
    emit(expr.root(), slots, 1);
}

void BoundExpression::emit(const ExprNode& node, const std::map<std::string, std::size_t>& slots,
                           std::size_t depth) {
    max_depth_ = std::max(max_depth_, depth);
    Instr in{Op::Const};
    switch (node.kind) {
        case NodeKind::Number: in = {Op::Const, 0, node.number}; break;
        case NodeKind::Name: {
            auto it = slots.find(node.name);
            if (it == slots.end()) throw Error(ErrorKind::UnboundName, "name '" + node.name + "' is not bound");
            in = {Op::Load, it->second};
            break;
        }
        case NodeKind::Neg:
        case NodeKind::Call:
            emit(*node.lhs, slots, depth);
            if (node.kind == NodeKind::Neg) {
                in.op = Op::Neg;
            } else {
                switch (node.fn) {
                    case Function::Sin: in.op = Op::Sin; break;
                    case Function::Cos: in.op = Op::Cos; break;
                    case Function::Exp: in.op = Op::Exp; break;
                    case Function::Log: in.op = Op::Log; break;
                }
            }
            break;
        default:
            emit(*node.lhs, slots, depth);
            emit(*node.rhs, slots, depth + 1);
            switch (node.kind) {
                case NodeKind::Add: in.op = Op::Add; break;
                case NodeKind::Sub: in.op = Op::Sub; break;
                case NodeKind::Mul: in.op = Op::Mul; break;
                case NodeKind::Div: in.op = Op::Div; break;
                default: in.op = Op::Pow; break;
            }
    }
    code_.push_back(in);
    text_.push_back(print_node(node));
}

bool BoundExpression::try_evaluate(std::span<const double> slots, double& out, std::size_t& fault) const noexcept {
    // Expressions are small; a fixed buffer covers all realistic depths.
    constexpr std::size_t kInline = 64;
    double inline_stack[kInline];
    std::vector<double> heap;
    double* stack = inline_stack;
    if (max_depth_ > kInline) {
        heap.resize(max_depth_);
        stack = heap.data();
    }
    std::size_t sp = 0;
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        double r;
        switch (in.op) {
            case Op::Const: stack[sp++] = in.value; continue;
            case Op::Load: r = slots[in.slot]; stack[sp++] = r; break;
            case Op::Neg: r = -stack[sp - 1]; stack[sp - 1] = r; break;
            case Op::Sin: r = std::sin(stack[sp - 1]); stack[sp - 1] = r; break;
            case Op::Cos: r = std::cos(stack[sp - 1]); stack[sp - 1] = r; break;
            case Op::Exp: r = std::exp(stack[sp - 1]); stack[sp - 1] = r; break;
            case Op::Log: r = std::log(stack[sp - 1]); stack[sp - 1] = r; break;
            default: {
                const double b = stack[--sp];
                const double a = stack[sp - 1];
                switch (in.op) {
                    case Op::Add: r = a + b; break;
                    case Op::Sub: r = a - b; break;
                    case Op::Mul: r = a * b; break;
                    case Op::Div: r = a / b; break;
                    default: r = std::pow(a, b); break;
                }
                stack[sp - 1] = r;
            }
        }
        if (!std::isfinite(r)) {
            fault = i;
            return false;
        }
    }
    out = stack[0];
    return true;
}

double BoundExpression::evaluate(std::span<const double> slots) const {
    if (slots.size() < slot_count_) throw Error(ErrorKind::InvalidArgument, "too few slot values");
    double out = 0.0;
    std::size_t fault = 0;
    if (!try_evaluate(slots, out, fault))
        throw Error(ErrorKind::DomainError, "non-finite value in sub-expression '" + describe(fault) + "'", fault);
    return out;
}

double evaluate(const ModelExpression& expr, const std::map<std::string, double>& params,
                const std::map<std::string, double>& covariates) {
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& name : expr.names()) {
        const auto p = params.find(name);
        const auto c = covariates.find(name);
        if (p != params.end() && c != covariates.end())
            throw Error(ErrorKind::AmbiguousBinding, "name '" + name + "' is bound as both parameter and covariate");
        if (p == params.end() && c == covariates.end())
            throw Error(ErrorKind::UnboundName, "name '" + name + "' is not bound");
        names.push_back(name);
        values.push_back(p != params.end() ? p->second : c->second);
    }
    return BoundExpression(expr, names).evaluate(values);
}

std::vector<double> predictions(const ModelExpression& expr, const std::map<std::string, double>& params,
                                const ObservationSet& obs) {
    std::vector<double> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        try {
            out[i] = evaluate(expr, params, obs.record(i).covariates);
        } catch (const Error& e) {
            throw Error(e.kind(), "record " + std::to_string(i) + ": " + e.what(), i);
        }
    }
    return out;
}

// ---------------------------------------------------------------- ParameterSpace

ParameterSpace::ParameterSpace(std::vector<ParameterAxis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw Error(ErrorKind::InvalidArgument, "parameter space has no axes");
    std::set<std::string> seen;
    for (const auto& a : axes_) {
        if (a.name.empty()) throw Error(ErrorKind::InvalidArgument, "axis with empty name");
        if (!seen.insert(a.name).second) throw Error(ErrorKind::InvalidArgument, "duplicate axis '" + a.name + "'");
        if (!(std::isfinite(a.lower) && std::isfinite(a.upper) && a.lower < a.upper))
            throw Error(ErrorKind::InvalidArgument, "axis '" + a.name + "' needs finite lower < upper");
        if (a.points < 2) throw Error(ErrorKind::InvalidArgument, "axis '" + a.name + "' needs at least 2 points");
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t k = axes_.size(); k-- > 0;) {
        strides_[k] = node_count_;
        node_count_ *= axes_[k].points;
    }
}

std::size_t ParameterSpace::axis_index(const std::string& name) const {
    for (std::size_t k = 0; k < axes_.size(); ++k)
        if (axes_[k].name == name) return k;
    throw Error(ErrorKind::UnknownAxis, "no axis named '" + name + "'");
}

std::vector<std::string> ParameterSpace::names() const {
    std::vector<std::string> out;
    for (const auto& a : axes_) out.push_back(a.name);
    return out;
}

double ParameterSpace::spacing(std::size_t k) const {
    const auto& a = axes_.at(k);
    return (a.upper - a.lower) / static_cast<double>(a.points);
}

double ParameterSpace::coordinate(std::size_t k, std::size_t i) const {
    const auto& a = axes_.at(k);
    return a.lower + (static_cast<double>(i) + 0.5) * spacing(k);
}

double ParameterSpace::cell_volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < axes_.size(); ++k) v *= spacing(k);
    return v;
}

std::vector<std::size_t> ParameterSpace::multi_index(std::size_t node) const {
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        idx[k] = node / strides_[k];
        node %= strides_[k];
    }
    return idx;
}

}  // namespace gauss
