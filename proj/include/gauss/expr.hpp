#pragma once

// A small arithmetic language for model functions V(theta; covariates):
// literals, names, + - * / ^, unary minus and sin/cos/exp/log.
//
// Precedence, tightest first: ^ (right-assoc), unary -, * /, + -.
// So "-p^2" is -(p^2) and "2^-1" is 0.5.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gauss {

enum class NodeKind { Number, Name, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Function { Sin, Cos, Exp, Log };

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    NodeKind kind = NodeKind::Number;
    double number = 0.0;      // Number
    std::string name;         // Name
    Function fn = Function::Sin;  // Call
    NodePtr lhs;              // binary lhs, unary / call operand
    NodePtr rhs;              // binary rhs

    static NodePtr make_number(double v);
    static NodePtr make_name(std::string n);
    static NodePtr make_unary(NodeKind k, NodePtr operand);
    static NodePtr make_binary(NodeKind k, NodePtr l, NodePtr r);
    static NodePtr make_call(Function f, NodePtr arg);
};

bool trees_equal(const ExprNode& a, const ExprNode& b) noexcept;
std::string_view function_name(Function f) noexcept;

/// A parsed, immutable expression. Cheap to copy (the tree is shared).
class ModelExpression {
public:
    static ModelExpression parse(std::string_view source);

    const std::string& source() const noexcept { return source_; }
    const ExprNode& root() const noexcept { return *root_; }

    /// Canonical text with only the parentheses precedence requires.
    std::string print() const;

    /// Every identifier in the tree. Parameters vs covariates are decided by
    /// the caller's context (the parameter axes).
    std::set<std::string> names() const;

    friend bool operator==(const ModelExpression& a, const ModelExpression& b) noexcept {
        return trees_equal(*a.root_, *b.root_);
    }

private:
    ModelExpression(std::string source, NodePtr root) : source_(std::move(source)), root_(std::move(root)) {}
    std::string source_;
    NodePtr root_;
};

std::string print_node(const ExprNode& node);

/// Expression compiled against a fixed slot layout; each name resolves to an
/// index into the value array passed to evaluate(). Evaluation is a postfix
/// stack program and is reentrant.
class BoundExpression {
public:
    BoundExpression(const ModelExpression& expr, std::span<const std::string> slot_names);

    /// Throws DomainError naming the sub-expression that went non-finite.
    double evaluate(std::span<const double> slots) const;

    /// Non-throwing form for hot loops: returns false on a non-finite
    /// intermediate and stores the offending instruction in `fault`.
    bool try_evaluate(std::span<const double> slots, double& out, std::size_t& fault) const noexcept;

    /// Text of the sub-expression computed by instruction `i`.
    const std::string& describe(std::size_t i) const { return text_.at(i); }
    std::size_t slot_count() const noexcept { return slot_count_; }

private:
    enum class Op : unsigned char { Const, Load, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Log };
    struct Instr {
        Op op;
        std::size_t slot = 0;
        double value = 0.0;
    };
    void emit(const ExprNode& node, const std::map<std::string, std::size_t>& slots, std::size_t depth);

    std::vector<Instr> code_;
    std::vector<std::string> text_;
    std::size_t max_depth_ = 0;
    std::size_t slot_count_ = 0;
};

/// Evaluates with every name bound exactly once across the two maps.
double evaluate(const ModelExpression& expr, const std::map<std::string, double>& params,
                const std::map<std::string, double>& covariates);

class ObservationSet;

/// Model value at each record's covariates, in record order.
std::vector<double> predictions(const ModelExpression& expr, const std::map<std::string, double>& params,
                                const ObservationSet& obs);

/// One axis of the parameter grid.
struct ParameterAxis {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t points = 2;
};

/// Box of parameter values, gridded at cell midpoints:
/// node k of an axis sits at lower + (k + 1/2) * (upper - lower) / points.
class ParameterSpace {
public:
    explicit ParameterSpace(std::vector<ParameterAxis> axes);

    std::size_t dimension() const noexcept { return axes_.size(); }
    const std::vector<ParameterAxis>& axes() const noexcept { return axes_; }
    const ParameterAxis& axis(std::size_t k) const { return axes_.at(k); }
    std::size_t axis_index(const std::string& name) const;
    std::vector<std::string> names() const;

    double spacing(std::size_t k) const;
    double coordinate(std::size_t k, std::size_t i) const;
    double cell_volume() const;
    std::size_t node_count() const noexcept { return node_count_; }
    /// Row-major strides; the last axis varies fastest.
    const std::vector<std::size_t>& strides() const noexcept { return strides_; }
    std::vector<std::size_t> multi_index(std::size_t node) const;

private:
    std::vector<ParameterAxis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t node_count_ = 1;
};

}  // namespace gauss
