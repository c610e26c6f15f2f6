#pragma once

#include <string>
#include <vector>

namespace gcre {

/// Arithmetic expression in the variables x and y.
///
/// Supports + - * / ^, unary minus, parentheses, the constants pi and e,
/// and the functions sin cos tan exp log sqrt abs sinh cosh tanh atan,
/// min(a,b), max(a,b), pow(a,b). Parsing happens once; evaluation runs a
/// compiled postfix program.
class Expression {
  public:
    Expression() : Expression("0") {}
    explicit Expression(const std::string &source);

    double operator()(double x, double y = 0.0) const;
    const std::string &source() const { return source_; }
    bool is_constant() const;

    struct Op {
        enum Code : unsigned char {
            constant, var_x, var_y, add, sub, mul, div, pow, neg, min, max,
            sin, cos, tan, exp, log, sqrt, abs, sinh, cosh, tanh, atan
        } code;
        double value = 0.0;
    };

  private:
    std::string source_;
    std::vector<Op> program_;
    std::size_t depth_ = 0;
};

} // namespace gcre
