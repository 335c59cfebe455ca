#include "dcforge/folded.hpp"

#include "dcforge/errors.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

namespace dcforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::map<std::string, double> parse_params(const std::string& text, const std::string& id) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("penalty '" + id + "': expected key=value, got '" + item + "'");
        try {
            std::size_t used = 0;
            const std::string val = item.substr(eq + 1);
            out[item.substr(0, eq)] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("penalty '" + id + "': bad value in '" + item + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

double param(const std::map<std::string, double>& ps, const std::string& key, double fallback) {
    const auto it = ps.find(key);
    return it == ps.end() ? fallback : it->second;
}

} // namespace

FoldedSpec make_folded(const std::string& id, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ArgumentError("folded: working interval must be positive");
    const std::size_t colon = id.find(':');
    const std::string head = id.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : id.substr(colon + 1);
    FoldedSpec s;
    s.name = id;
    s.T = T;
    if (head == "scad") {
        const auto ps = parse_params(rest, id);
        const double a = param(ps, "a", 3.7), lam = param(ps, "lambda", 1.0);
        if (!(a > 2.0) || !(lam > 0.0)) throw ArgumentError("scad: needs a > 2 and lambda > 0");
        s.f = [a, lam](double u) {
            if (u <= lam) return lam * u;
            if (u <= a * lam) return (2.0 * a * lam * u - u * u - lam * lam) / (2.0 * (a - 1.0));
            return lam * lam * (a + 1.0) / 2.0;
        };
        s.derivative = lam;
    } else if (head == "mcp") {
        const auto ps = parse_params(rest, id);
        const double a = param(ps, "a", 2.0), lam = param(ps, "lambda", 1.0);
        if (!(a > 0.0) || !(lam > 0.0)) throw ArgumentError("mcp: needs a > 0 and lambda > 0");
        s.f = [a, lam](double u) { return u <= a * lam ? lam * u - u * u / (2.0 * a) : a * lam * lam / 2.0; };
        s.derivative = lam;
    } else if (head == "capped_l1") {
        const auto ps = parse_params(rest, id);
        const double a = param(ps, "a", 1.0), lam = param(ps, "lambda", 1.0);
        if (!(a > 0.0) || !(lam > 0.0)) throw ArgumentError("capped_l1: needs a > 0 and lambda > 0");
        s.f = [a, lam](double u) { return lam * std::min(u, a); };
        s.derivative = lam;
    } else if (head == "log") {
        const auto ps = parse_params(rest, id);
        const double gamma = param(ps, "gamma", 1.0), lam = param(ps, "lambda", 1.0);
        if (!(gamma > 0.0) || !(lam > 0.0)) throw ArgumentError("log: needs gamma > 0 and lambda > 0");
        s.f = [gamma, lam](double u) { return lam * std::log1p(u / gamma); };
        s.derivative = lam / gamma;
    } else if (id == "sqrt1p" || id == "fig1b2") {
        s.f = [](double u) { return std::sqrt(u + 1.0); };
        s.derivative = 0.5;
    } else if (id == "sqrtabs") {
        s.f = [](double u) { return std::sqrt(u); };
        s.derivative = kInf;
    } else if (id == "fig1a") {
        s.f = [](double u) { return -u * u - 1.0; };
        s.derivative = 0.0;
    } else if (id == "fig1b1") {
        s.f = [](double u) { return -2.0 * (u - 1.0) * (u - 1.0) + 3.0; };
        s.derivative = 4.0;
    } else {
        s.f = parse_univariate(head == "expr" ? rest : id);
    }
    return s;
}

void validate_folded(const FoldedSpec& spec) {
    if (!spec.f) throw ArgumentError("folded: missing function");
    const double f0 = spec.f(0.0);
    if (!std::isfinite(f0)) throw CertificationError("folded: f(0) is not finite");
    if (std::abs(spec.f(0x1p-40) - f0) > 1e-3 * (1.0 + std::abs(f0)))
        throw CertificationError("folded: f is not continuous at 0");
    constexpr int kPoints = 1001;
    std::vector<double> v(kPoints);
    for (int i = 0; i < kPoints; ++i) v[i] = spec.f(spec.T * i / (kPoints - 1));
    for (int i = 1; i + 1 < kPoints; ++i)
        if (v[i] < 0.5 * (v[i - 1] + v[i + 1]) - 1e-9 * (1.0 + std::abs(v[i])))
            throw CertificationError("folded: f is not concave on [0, T]");
}

double right_derivative_at_zero(const FoldedSpec& spec) {
    if (spec.derivative) return *spec.derivative;
    const double f0 = spec.f(0.0);
    std::vector<double> d(41, 0.0);
    for (int k = 1; k <= 40; ++k) {
        const double tau = std::ldexp(1.0, -k);
        d[k] = (spec.f(tau) - f0) / tau;
        if (k > 1 && d[k] > 1e6 && d[k] > d[k - 1]) return kInf;
    }
    return 2.0 * d[21] - d[20];
}

namespace {

/// Right-most root in [-T, 0) of phi with phi(0) = 0 counted as positive; -inf if none.
double rightmost_negative_root(const std::function<double(double)>& phi, double T) {
    double hi = 0.0, lo = -1.0;
    for (;;) {
        lo = std::max(lo, -T);
        if (phi(lo) <= 0.0) break;
        if (lo == -T) return -kInf;
        hi = lo;
        lo *= 2.0;
    }
    if (phi(lo) == 0.0 && lo != 0.0) {
        // Prefer an exact bracket end when it is itself the root.
        bool positive_between = true;
        for (int i = 1; i < 64 && positive_between; ++i) positive_between = phi(lo + (hi - lo) * i / 64.0) > 0.0;
        if (positive_between) return lo;
    }
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) <= 0.0 && mid != 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

FoldedDecomposition decompose(const FoldedSpec& spec) {
    validate_folded(spec);
    const double d = right_derivative_at_zero(spec);
    if (!std::isfinite(d))
        throw NotDcError("folded: f'(0;+) is infinite, so f(|t|) is not a dc function (" + spec.name + ")");
    const auto f = spec.f;
    const double f0 = f(0.0), T = spec.T;
    const Domain dom = Domain::box(1, -T, T);
    FoldedDecomposition out{'a', d, 0.0, 0.0, {}, {}, DcFunction::constant(0.0, dom)};
    auto theta = [f](double t) { return f(std::abs(t)); };

    if (d <= 0.0) {
        out.kase = 'a';
        out.f1 = theta;
        out.f2 = theta;
        ConvexExpr neg = ConvexExpr::callable(1, [theta](const Vector& x) { return -theta(x[0]); }, "neg_theta");
        out.dc = DcFunction::concave(neg, dom);
        return out;
    }

    out.kase = 'b';
    out.t_minus = rightmost_negative_root([&](double t) { return f(-t) - (f0 + d * t); }, T);
    out.t_plus = -rightmost_negative_root([&](double s) { return f(-s) - (f0 + d * s); }, T);
    const double tm = out.t_minus, tp = out.t_plus;
    out.f1 = [f, f0, d, tm](double t) {
        if (t >= 0.0) return f(t);
        if (t >= tm) return f0 + d * t;
        return f(-t);
    };
    out.f2 = [f, f0, d, tp](double t) {
        if (t <= 0.0) return f(-t);
        if (t <= tp) return f0 - d * t;
        return f(t);
    };
    const auto f1 = out.f1, f2 = out.f2;
    ConvexExpr n1 = ConvexExpr::callable(1, [f1](const Vector& x) { return -f1(x[0]); }, "neg_f1");
    ConvexExpr n2 = ConvexExpr::callable(1, [f2](const Vector& x) { return -f2(x[0]); }, "neg_f2");
    out.dc = DcFunction(ConvexExpr::max_of({n1, n2}), ConvexExpr::sum({n1, n2}), dom);
    return out;
}

std::vector<CheckReport> folded_checks(const FoldedSpec& spec, const FoldedDecomposition& d, std::uint64_t seed,
                                       int samples, double tol) {
    const double T = spec.T;
    auto draw = [T](Rng& r) {
        Vector x(1);
        x[0] = r.uniform(-T, T);
        return x;
    };
    const auto f = spec.f;
    std::vector<CheckReport> out;
    out.push_back(check_sampled("folded.reconstruction", samples, tol, seed, draw,
                                [&](const Vector& x) { return std::abs(d.dc.value(x) - f(std::abs(x[0]))); }));
    for (auto& r : check_components("folded", d.dc, seed, samples, 1e-8)) out.push_back(std::move(r));
    out.push_back(check_sampled("folded.symmetry", samples, 1e-9, seed, draw,
                                [&](const Vector& x) { return std::abs(d.dc.value(x) - d.dc.value(-x)); }));
    if (d.kase == 'b') {
        out.push_back(check_sampled("folded.domination", samples, 1e-12, seed, draw, [&](const Vector& x) {
            const double t = x[0];
            double v = 0.0;
            if (t <= 0.0 && t > d.t_minus) v = std::max(v, d.f1(t) - f(-t));
            if (t >= 0.0 && t < d.t_plus) v = std::max(v, d.f2(t) - f(t));
            return v;
        }));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expression parser

namespace {

using Fn = std::function<double(double)>;

class Parser {
public:
    explicit Parser(std::string s) : s_(std::move(s)) {}

    Fn parse() {
        Fn e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression '" + s_ + "' at " + std::to_string(pos_) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Fn expr() {
        Fn lhs = term();
        for (;;) {
            if (eat('+')) {
                Fn r = term();
                lhs = [lhs, r](double u) { return lhs(u) + r(u); };
            } else if (eat('-')) {
                Fn r = term();
                lhs = [lhs, r](double u) { return lhs(u) - r(u); };
            } else {
                return lhs;
            }
        }
    }
    Fn term() {
        Fn lhs = unary();
        for (;;) {
            if (eat('*')) {
                Fn r = unary();
                lhs = [lhs, r](double u) { return lhs(u) * r(u); };
            } else if (eat('/')) {
                Fn r = unary();
                lhs = [lhs, r](double u) { return lhs(u) / r(u); };
            } else {
                return lhs;
            }
        }
    }
    Fn unary() {
        if (eat('-')) {
            Fn e = unary();
            return [e](double u) { return -e(u); };
        }
        if (eat('+')) return unary();
        return power();
    }
    Fn power() {
        Fn base = atom();
        if (eat('^')) {
            Fn ex = unary();
            return [base, ex](double u) { return std::pow(base(u), ex(u)); };
        }
        return base;
    }
    Fn atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            Fn e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("bad number");
            }
            pos_ += used;
            return [v](double) { return v; };
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "u" || name == "x" || name == "t") return [](double u) { return u; };
            if (name == "pi") return [](double) { return M_PI; };
            if (name == "e") return [](double) { return M_E; };
            if (!eat('(')) fail("expected '(' after " + name);
            Fn a = expr();
            if (name == "min" || name == "max") {
                if (!eat(',')) fail("expected ','");
                Fn b = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "min") return [a, b](double u) { return std::min(a(u), b(u)); };
                return [a, b](double u) { return std::max(a(u), b(u)); };
            }
            if (!eat(')')) fail("expected ')'");
            if (name == "sqrt") return [a](double u) { return std::sqrt(a(u)); };
            if (name == "log") return [a](double u) { return std::log(a(u)); };
            if (name == "exp") return [a](double u) { return std::exp(a(u)); };
            if (name == "abs") return [a](double u) { return std::abs(a(u)); };
            fail("unknown function " + name);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string s_;
    std::size_t pos_ = 0;
};

} // namespace

std::function<double(double)> parse_univariate(const std::string& text) {
    if (text.empty()) throw ParseError("empty expression");
    return Parser(text).parse();
}

} // namespace dcforge
