#include "parahess/expression.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

#include "parahess/errors.hpp"

namespace parahess {

namespace {

constexpr std::size_t kMaxDepth = 64;

using Op = Expression::Op;

class Parser {
public:
    Parser(const std::string& s, const std::vector<std::string>& vars) : s_(s), vars_(vars), used_(vars.size(), false) {}

    std::vector<Expression::Instr> run() {
        expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return std::move(code_);
    }
    const std::vector<bool>& used() const { return used_; }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression '" + s_ + "': " + what + " at position " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool accept(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    void emit(Op op, double v = 0.0, std::size_t idx = 0) { code_.push_back({op, v, idx}); }

    void expr() {
        term();
        while (true) {
            if (accept('+')) {
                term();
                emit(Op::add);
            } else if (accept('-')) {
                term();
                emit(Op::sub);
            } else {
                return;
            }
        }
    }
    void term() {
        unary();
        while (true) {
            if (accept('*')) {
                unary();
                emit(Op::mul);
            } else if (accept('/')) {
                unary();
                emit(Op::div);
            } else {
                return;
            }
        }
    }
    void unary() {
        if (accept('-')) {
            unary();
            emit(Op::neg);
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
            emit(Op::pow);
        }
    }
    void primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        const char c = s_[i_];
        if (accept('(')) {
            expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + i_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            i_ += static_cast<std::size_t>(end - begin);
            emit(Op::push, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            const std::string name = s_.substr(start, i_ - start);
            if (accept('(')) {
                call(name);
                return;
            }
            for (std::size_t k = 0; k < vars_.size(); ++k) {
                if (vars_[k] == name) {
                    used_[k] = true;
                    emit(Op::load, 0.0, k);
                    return;
                }
            }
            if (name == "pi") {
                emit(Op::push, std::numbers::pi);
                return;
            }
            i_ = start;
            fail("unknown variable '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
    void call(const std::string& name) {
        static const std::map<std::string, std::pair<Op, int>> fns = {
            {"exp", {Op::exp, 1}}, {"log", {Op::log, 1}}, {"sqrt", {Op::sqrt, 1}}, {"abs", {Op::abs, 1}},
            {"sin", {Op::sin, 1}}, {"cos", {Op::cos, 1}}, {"pow", {Op::pow, 2}},   {"min", {Op::min, 2}},
            {"max", {Op::max, 2}}};
        const auto it = fns.find(name);
        if (it == fns.end()) fail("unknown function '" + name + "'");
        int args = 0;
        if (!accept(')')) {
            do {
                expr();
                ++args;
            } while (accept(','));
            expect(')');
        }
        if (args != it->second.second)
            fail("function '" + name + "' takes " + std::to_string(it->second.second) + " argument(s)");
        emit(it->second.first);
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::vector<bool> used_;
    std::vector<Expression::Instr> code_;
    std::size_t i_ = 0;
};

}  // namespace

Expression Expression::compile(const std::string& text, const std::vector<std::string>& variables) {
    Parser parser(text, variables);
    Expression e;
    e.text_ = text;
    e.code_ = parser.run();
    e.used_ = parser.used();
    std::size_t depth = 0;
    for (const auto& in : e.code_) {
        switch (in.op) {
            case Op::push:
            case Op::load: ++depth; break;
            case Op::add:
            case Op::sub:
            case Op::mul:
            case Op::div:
            case Op::pow:
            case Op::min:
            case Op::max: --depth; break;
            default: break;
        }
        e.depth_ = std::max(e.depth_, depth);
    }
    if (e.depth_ > kMaxDepth) throw ConfigError("expression '" + text + "' is nested too deeply");
    return e;
}

bool Expression::uses(std::size_t variable) const { return variable < used_.size() && used_[variable]; }

double Expression::eval(std::span<const double> values) const {
    std::array<double, kMaxDepth> st;
    std::size_t sp = 0;
    for (const auto& in : code_) {
        switch (in.op) {
            case Op::push: st[sp++] = in.value; break;
            case Op::load: st[sp++] = values[in.index]; break;
            case Op::neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::add: --sp; st[sp - 1] += st[sp]; break;
            case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
            case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
            case Op::div: --sp; st[sp - 1] /= st[sp]; break;
            case Op::pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
            case Op::min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
            case Op::max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
            case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
            case Op::log: st[sp - 1] = std::log(st[sp - 1]); break;
            case Op::sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
            case Op::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
            case Op::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
            case Op::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        }
    }
    return st[0];
}

}  // namespace parahess
