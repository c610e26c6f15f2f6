#include "gcre/expression.hpp"

#include "gcre/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string_view>

namespace gcre {

namespace {

using Op = Expression::Op;

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<Op> parse() {
        expr();
        skip();
        if (pos_ != text_.size())
            fail("unexpected character");
        return std::move(out_);
    }

  private:
    [[noreturn]] void fail(const std::string &msg) const {
        throw InvalidInput("expression '" + std::string(text_) + "': " + msg + " at offset " +
                           std::to_string(pos_));
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    void expr() {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                out_.push_back({Op::add});
            } else if (accept('-')) {
                term();
                out_.push_back({Op::sub});
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                out_.push_back({Op::mul});
            } else if (accept('/')) {
                unary();
                out_.push_back({Op::div});
            } else {
                return;
            }
        }
    }

    void unary() {
        if (accept('-')) {
            unary();
            out_.push_back({Op::neg});
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (accept('^')) {
            unary();
            out_.push_back({Op::pow});
        }
    }

    void primary() {
        skip();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        const char c = text_[pos_];
        if (accept('(')) {
            expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_'))
                ++pos_;
            call(text_.substr(start, pos_ - start));
            return;
        }
        fail("unexpected character");
    }

    void number() {
        const char *first = text_.data() + pos_;
        const char *last = text_.data() + text_.size();
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc())
            fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        out_.push_back({Op::constant, value});
    }

    void call(std::string_view name) {
        if (name == "x") {
            out_.push_back({Op::var_x});
            return;
        }
        if (name == "y") {
            out_.push_back({Op::var_y});
            return;
        }
        if (name == "pi") {
            out_.push_back({Op::constant, std::numbers::pi});
            return;
        }
        if (name == "e") {
            out_.push_back({Op::constant, std::numbers::e});
            return;
        }
        struct Fn {
            std::string_view name;
            Op::Code code;
            int arity;
        };
        static constexpr std::array<Fn, 14> table{{
            {"sin", Op::sin, 1},   {"cos", Op::cos, 1},   {"tan", Op::tan, 1},
            {"exp", Op::exp, 1},   {"log", Op::log, 1},   {"sqrt", Op::sqrt, 1},
            {"abs", Op::abs, 1},   {"sinh", Op::sinh, 1}, {"cosh", Op::cosh, 1},
            {"tanh", Op::tanh, 1}, {"atan", Op::atan, 1}, {"min", Op::min, 2},
            {"max", Op::max, 2},   {"pow", Op::pow, 2},
        }};
        for (const Fn &fn : table) {
            if (fn.name != name)
                continue;
            expect('(');
            expr();
            for (int k = 1; k < fn.arity; ++k) {
                expect(',');
                expr();
            }
            expect(')');
            out_.push_back({fn.code});
            return;
        }
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Op> out_;
};

} // namespace

Expression::Expression(const std::string &source) : source_(source) {
    program_ = Parser(source_).parse();
    std::size_t depth = 0;
    for (const Op &op : program_) {
        switch (op.code) {
        case Op::constant:
        case Op::var_x:
        case Op::var_y:
            depth_ = std::max(depth_, ++depth);
            break;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow:
        case Op::min:
        case Op::max:
            --depth;
            break;
        default:
            break;
        }
    }
}

bool Expression::is_constant() const {
    for (const Op &op : program_)
        if (op.code == Op::var_x || op.code == Op::var_y)
            return false;
    return true;
}

double Expression::operator()(double x, double y) const {
    constexpr std::size_t small = 32;
    double fixed[small] = {};
    std::vector<double> heap;
    double *stack = fixed;
    if (depth_ > small) {
        heap.resize(depth_);
        stack = heap.data();
    }
    std::size_t top = 0;
    for (const Op &op : program_) {
        switch (op.code) {
        case Op::constant: stack[top++] = op.value; break;
        case Op::var_x: stack[top++] = x; break;
        case Op::var_y: stack[top++] = y; break;
        case Op::add: --top; stack[top - 1] += stack[top]; break;
        case Op::sub: --top; stack[top - 1] -= stack[top]; break;
        case Op::mul: --top; stack[top - 1] *= stack[top]; break;
        case Op::div: --top; stack[top - 1] /= stack[top]; break;
        case Op::pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
        case Op::min: --top; stack[top - 1] = std::min(stack[top - 1], stack[top]); break;
        case Op::max: --top; stack[top - 1] = std::max(stack[top - 1], stack[top]); break;
        case Op::neg: stack[top - 1] = -stack[top - 1]; break;
        case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
        case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
        case Op::tan: stack[top - 1] = std::tan(stack[top - 1]); break;
        case Op::exp: stack[top - 1] = std::exp(stack[top - 1]); break;
        case Op::log: stack[top - 1] = std::log(stack[top - 1]); break;
        case Op::sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
        case Op::abs: stack[top - 1] = std::abs(stack[top - 1]); break;
        case Op::sinh: stack[top - 1] = std::sinh(stack[top - 1]); break;
        case Op::cosh: stack[top - 1] = std::cosh(stack[top - 1]); break;
        case Op::tanh: stack[top - 1] = std::tanh(stack[top - 1]); break;
        case Op::atan: stack[top - 1] = std::atan(stack[top - 1]); break;
        }
    }
    return stack[0];
}

} // namespace gcre
