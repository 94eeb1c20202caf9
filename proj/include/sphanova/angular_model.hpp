#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sphanova/error.hpp"

namespace sphanova {

/// An angular function f on [-1, 1] together with its log-derivative
/// φ = f'/f. Only ratios of f matter, so named families are stored up to a
/// positive constant (FvML as exp(κ(t - 1)) to keep large κ finite).
class AngularModel {
public:
    enum class Kind { FvML, Lin, Log, Logis, Custom };

    static AngularModel fvml(double kappa) { return AngularModel(Kind::FvML, kappa, 0.0); }
    static AngularModel lin(double a) { return AngularModel(Kind::Lin, a, 0.0); }
    static AngularModel log(double a) { return AngularModel(Kind::Log, a, 0.0); }
    static AngularModel logis(double a, double b) { return AngularModel(Kind::Logis, a, b); }

    /// User-defined model. `phi` must be f'/f; it is only checked, never derived.
    static AngularModel custom(std::string name, std::function<double(double)> f,
                               std::function<double(double)> phi) {
        AngularModel m(Kind::Custom, 0.0, 0.0);
        m.custom_ = std::make_shared<const CustomFns>(CustomFns{std::move(name), std::move(f), std::move(phi)});
        return m;
    }

    Kind kind() const noexcept { return kind_; }
    double kappa() const noexcept { return p1_; }
    double a() const noexcept { return p1_; }
    double b() const noexcept { return p2_; }

    double f(double t) const {
        switch (kind_) {
        case Kind::FvML: return std::exp(p1_ * (t - 1.0));
        case Kind::Lin: return t + p1_;
        case Kind::Log: return std::log(t + p1_);
        case Kind::Logis: return logis_f(std::acos(std::clamp(t, -1.0, 1.0)));
        case Kind::Custom: return custom_->f(t);
        }
        return 0.0;
    }

    double phi(double t) const {
        switch (kind_) {
        case Kind::FvML: return p1_;
        case Kind::Lin: return 1.0 / (t + p1_);
        case Kind::Log: return 1.0 / ((t + p1_) * std::log(t + p1_));
        case Kind::Logis: return score_kernel(t) / std::sqrt(std::max(0.0, 1.0 - t * t));
        case Kind::Custom: return custom_->phi(t);
        }
        return 0.0;
    }

    /// φ(t)·sqrt(1 - t²), bounded for every named family.
    double score_kernel(double t) const {
        if (kind_ == Kind::Logis) return logis_kernel(std::acos(std::clamp(t, -1.0, 1.0)));
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        return s == 0.0 ? 0.0 : phi(t) * s;
    }

    /// f and the score kernel at t = cos(psi); exact in psi for Logis.
    double f_at_angle(double psi) const { return kind_ == Kind::Logis ? logis_f(psi) : f(std::cos(psi)); }
    double kernel_at_angle(double psi) const {
        if (kind_ == Kind::Logis) return logis_kernel(psi);
        const double s = std::sin(psi);
        return s == 0.0 ? 0.0 : phi(std::cos(psi)) * s;
    }

    /// Round-trippable spec string, e.g. "logis:a=2,b=1".
    std::string spec() const {
        std::ostringstream os;
        os.precision(17);
        switch (kind_) {
        case Kind::FvML: os << "fvml:kappa=" << p1_; break;
        case Kind::Lin: os << "lin:a=" << p1_; break;
        case Kind::Log: os << "log:a=" << p1_; break;
        case Kind::Logis: os << "logis:a=" << p1_ << ",b=" << p2_; break;
        case Kind::Custom: os << "custom:" << custom_->name; break;
        }
        return os.str();
    }

    /// Short display label, e.g. "FvML(2)" or "Logis(2,1)".
    std::string label() const {
        std::ostringstream os;
        switch (kind_) {
        case Kind::FvML: os << "FvML(" << p1_ << ")"; break;
        case Kind::Lin: os << "Lin(" << p1_ << ")"; break;
        case Kind::Log: os << "Log(" << p1_ << ")"; break;
        case Kind::Logis: os << "Logis(" << p1_ << "," << p2_ << ")"; break;
        case Kind::Custom: os << custom_->name; break;
        }
        return os.str();
    }

private:
    struct CustomFns {
        std::string name;
        std::function<double(double)> f;
        std::function<double(double)> phi;
    };

    AngularModel(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}

    double logis_f(double psi) const {
        const double y = p1_ * std::exp(-p2_ * psi);
        return y / ((1.0 + y) * (1.0 + y));
    }
    // d/dt log f = b (1 - y) / ((1 + y) sqrt(1 - t²)) with y = a exp(-b arccos t)
    double logis_kernel(double psi) const {
        const double y = p1_ * std::exp(-p2_ * psi);
        return p2_ * (1.0 - y) / (1.0 + y);
    }

    Kind kind_;
    double p1_;
    double p2_;
    std::shared_ptr<const CustomFns> custom_;
};

struct ValidationReport {
    bool ok = true;
    std::optional<Errc> issue;
    double t = 0.0;  // where the problem was found
    std::string message;

    explicit operator bool() const noexcept { return ok; }
};

namespace detail {

inline ValidationReport fail(Errc e, double t, std::string msg) {
    return ValidationReport{false, e, t, std::move(msg)};
}

inline ValidationReport check_parameters(const AngularModel& m) {
    using K = AngularModel::Kind;
    switch (m.kind()) {
    case K::FvML:
        if (!(m.kappa() > 0.0) || !std::isfinite(m.kappa()))
            return fail(Errc::InvalidModel, 0.0, "FvML needs kappa > 0");
        break;
    case K::Lin:
        if (!(m.a() > 1.0)) return fail(Errc::NotPositive, -1.0, "Lin(a) needs a > 1 so that t + a > 0 at t = -1");
        break;
    case K::Log:
        if (!(m.a() > 2.0))
            return fail(Errc::NotPositive, -1.0, "Log(a) needs a > 2 so that log(t + a) > 0 at t = -1");
        break;
    case K::Logis:
        if (!(m.a() > 0.0) || !(m.b() > 0.0)) return fail(Errc::InvalidModel, 0.0, "Logis(a,b) needs a, b > 0");
        break;
    case K::Custom: break;
    }
    return {};
}

inline constexpr int kValidationGrid = 1024;

inline double grid_point(int i) { return -1.0 + 2.0 * i / (kValidationGrid - 1); }

} // namespace detail

/// Strict positivity and finiteness of f on the validation grid. This is the
/// part of `validate` a tilde-law construction cannot do without.
inline ValidationReport check_positive(const AngularModel& m) {
    if (auto r = detail::check_parameters(m); !r) return r;
    for (int i = 0; i < detail::kValidationGrid; ++i) {
        const double t = detail::grid_point(i);
        const double v = m.f(t);
        if (!(v > 0.0) || !std::isfinite(v))
            return detail::fail(Errc::NotPositive, t, m.label() + ": f(" + std::to_string(t) + ") is not positive");
    }
    return {};
}

/// Full angular-function check: positivity, monotonicity on a 1024-point
/// grid and, for custom models, φ against a finite difference of log f.
inline ValidationReport validate(const AngularModel& m) {
    if (auto r = check_positive(m); !r) return r;
    double prev = m.f(-1.0);
    for (int i = 1; i < detail::kValidationGrid; ++i) {
        const double t = detail::grid_point(i);
        const double v = m.f(t);
        if (v - prev < -1e-12 * std::max(1.0, std::abs(prev)))
            return detail::fail(Errc::NotMonotone, t, m.label() + ": f decreases near t = " + std::to_string(t));
        prev = v;
    }
    if (m.kind() == AngularModel::Kind::Custom) {
        const double h = 1e-4;
        for (int i = 1; i + 1 < detail::kValidationGrid; ++i) {
            const double t = detail::grid_point(i);
            if (t - 2 * h <= -1.0 || t + 2 * h >= 1.0) continue;
            auto lf = [&](double x) { return std::log(m.f(x)); };
            const double fd = (lf(t - 2 * h) - 8 * lf(t - h) + 8 * lf(t + h) - lf(t + 2 * h)) / (12 * h);
            const double ph = m.phi(t);
            if (!(std::abs(fd - ph) <= 1e-6 * std::max(1.0, std::abs(ph))))
                return detail::fail(Errc::InvalidModel, t,
                                    m.label() + ": phi does not match f'/f at t = " + std::to_string(t));
        }
    }
    return {};
}

namespace detail {

inline std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

inline double parse_double(std::string_view s, std::string_view context) {
    const std::string str = trim(s);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(str, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (str.empty() || pos != str.size() || !std::isfinite(v))
        throw Error(Errc::ParseError, "bad number '" + str + "' in '" + std::string(context) + "'");
    return v;
}

} // namespace detail

/// Parses "fvml:kappa=2", "lin:a=2", "log:a=2.5", "logis:a=2,b=1".
inline AngularModel parse_model_spec(std::string_view spec) {
    const std::string s = detail::trim(spec);
    const auto colon = s.find(':');
    if (colon == std::string::npos || colon == 0)
        throw Error(Errc::ParseError, "model spec '" + s + "' must look like name:key=value[,key=value]");
    std::string name = s.substr(0, colon);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });

    std::map<std::string, double> kv;
    std::string_view rest(s);
    rest.remove_prefix(colon + 1);
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::ParseError, "expected key=value in model spec '" + s + "'");
        std::string key = detail::trim(item.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
        if (key.empty() || kv.count(key)) throw Error(Errc::ParseError, "bad or repeated key in '" + s + "'");
        kv[key] = detail::parse_double(item.substr(eq + 1), s);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }

    auto take = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw Error(Errc::ParseError, "model spec '" + s + "' is missing '" + key + "'");
        const double v = it->second;
        kv.erase(it);
        return v;
    };
    auto done = [&](AngularModel m) {
        if (!kv.empty()) throw Error(Errc::ParseError, "unknown key '" + kv.begin()->first + "' in '" + s + "'");
        return m;
    };

    if (name == "fvml") return done(AngularModel::fvml(take("kappa")));
    if (name == "lin") return done(AngularModel::lin(take("a")));
    if (name == "log") return done(AngularModel::log(take("a")));
    if (name == "logis") {
        const double a = take("a");
        return done(AngularModel::logis(a, take("b")));
    }
    throw Error(Errc::ParseError, "unknown model family '" + name + "'");
}

/// Splits a comma-separated list of model specs. Keys of a multi-parameter
/// spec also use commas, so a token without ':' continues the previous spec.
inline std::vector<std::string> split_model_list(std::string_view list) {
    std::vector<std::string> out;
    std::string_view rest = list;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string tok = detail::trim(rest.substr(0, comma));
        if (!tok.empty()) {
            if (tok.find(':') == std::string::npos) {
                if (out.empty()) throw Error(Errc::ParseError, "model list starts with '" + tok + "'");
                out.back() += "," + tok;
            } else {
                out.push_back(tok);
            }
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

} // namespace sphanova
