#include "auxbound/systems.hpp"

#include <cmath>

namespace auxbound {

void PolyBoundSpec::validate(int n) const {
    if (!whole_space)
        throw InvalidInputError(
            "PolyBoundSpec: only whole-space (polynomial) bounds are supported");
    for (const BoundTerm& t : terms) {
        if (t.component < 0 || t.component >= n)
            throw InvalidInputError("PolyBoundSpec: component index out of range");
        if (static_cast<int>(t.exponents.size()) != n)
            throw InvalidInputError("PolyBoundSpec: exponent list must have length n");
        for (int e : t.exponents)
            if (e < 0) throw InvalidInputError("PolyBoundSpec: negative exponent");
        if (t.degree() < 1)
            throw InvalidInputError("PolyBoundSpec: degree-0 term violates f(t,0) = 0");
        if (!t.coeff_abs) throw InvalidInputError("PolyBoundSpec: missing coefficient");
    }
}

void SystemSpec::validate(double t_probe_end) const {
    if (n < 1 || !B) throw InvalidInputError("SystemSpec: dimension/linear block missing");
    bound_spec.validate(n);
    const Rvec zero = Rvec::Zero(n);
    for (int i = 0; i <= 64; ++i) {
        const double t = t0 + (t_probe_end - t0) * i / 64.0;
        if (!B(t).allFinite()) throw InvalidInputError("SystemSpec: B(t) not finite");
        if (f && f(t, zero).norm() > 1e-12)
            throw InvalidInputError("SystemSpec: f(t, 0) != 0");
        if (eta && eta(t).norm() > 1.0 + 1e-9)
            throw InvalidInputError("SystemSpec: ||eta(t)|| exceeds 1");
    }
    if (F0 < 0.0) throw InvalidInputError("SystemSpec: F0 must be nonnegative");
    if (F0 > 0.0 && !eta) throw InvalidInputError("SystemSpec: forcing shape missing");
}

void BenchmarkParams::validate() const {
    if (omega1_sq <= 0.0 || omega2_sq <= 0.0)
        throw InvalidInputError("BenchmarkParams: stiffness omega^2 must be positive");
    if (eps1 < 0.0 || eps2 < 0.0)
        throw InvalidInputError("BenchmarkParams: cubic gains must be nonnegative");
    if (F1bar < 0.0 || F2bar < 0.0)
        throw InvalidInputError("BenchmarkParams: forcing amplitudes must be nonnegative");
}

namespace {

Rmat constant_block(const BenchmarkParams& p) {
    Rmat a(4, 4);
    a << 0.0, 1.0, 0.0, 0.0,                                   //
        -(p.omega1_sq + p.kappa), -p.alpha1, p.kappa, 0.0,     //
        0.0, 0.0, 0.0, 1.0,                                    //
        p.kappa, 0.0, -(p.omega2_sq + p.kappa), -p.alpha2;
    return a;
}

SystemSpec coupled_oscillators(const BenchmarkParams& p, bool duffing) {
    p.validate();
    SystemSpec sys;
    sys.n = 4;
    const Rmat a0 = constant_block(p);
    sys.B = [p, a0](double t) {
        const double chi11 = p.a11 * std::sin(p.w11 * t) + p.a12 * std::sin(p.w12 * t);
        const double chi12 = p.a21 * std::sin(p.w21 * t) + p.a22 * std::sin(p.w22 * t);
        Rmat b = a0;
        b(1, 0) -= chi11;
        b(1, 1) -= chi12;
        b(3, 1) -= chi12; // chi21 = chi12
        b(3, 2) -= chi11; // chi22 = chi11
        return b;
    };

    const double e1 = p.eps1, e2 = p.eps2;
    if (duffing) {
        sys.f = [e1, e2](double, const Rvec& x) {
            Rvec out = Rvec::Zero(4);
            out(1) = -e1 * x(0) * x(0) * x(0);
            out(3) = -e2 * x(2) * x(2) * x(2);
            return out;
        };
        sys.bound_spec = monomial_bound({
            BoundTerm{1, [e1](double) { return e1; }, {3, 0, 0, 0}},
            BoundTerm{3, [e2](double) { return e2; }, {0, 0, 3, 0}},
        });
    } else {
        sys.f = [e1, e2](double, const Rvec& x) {
            Rvec out = Rvec::Zero(4);
            out(1) = -e1 * x(1) * x(1) * x(1);
            out(3) = -e2 * x(3) * x(3) * x(3);
            return out;
        };
        sys.bound_spec = monomial_bound({
            BoundTerm{1, [e1](double) { return e1; }, {0, 3, 0, 0}},
            BoundTerm{3, [e2](double) { return e2; }, {0, 0, 0, 3}},
        });
    }

    // F_* = (0, F1 sin q1 t, 0, F2 sin q2 t); eta normalized by the Euclidean
    // amplitude so that sup||eta|| <= 1 (equality when one amplitude is zero).
    const double amp = std::hypot(p.F1bar, p.F2bar);
    sys.F0 = amp;
    if (amp > 0.0) {
        const double f1 = p.F1bar / amp, f2 = p.F2bar / amp;
        const double q1 = p.q1, q2 = p.q2;
        sys.eta = [f1, f2, q1, q2](double t) {
            Rvec out = Rvec::Zero(4);
            out(1) = f1 * std::sin(q1 * t);
            out(3) = f2 * std::sin(q2 * t);
            return out;
        };
    }
    sys.validate();
    return sys;
}

} // namespace

SystemSpec vanderpol_like(const BenchmarkParams& params) {
    return coupled_oscillators(params, /*duffing=*/false);
}

SystemSpec duffing_like(const BenchmarkParams& params) {
    return coupled_oscillators(params, /*duffing=*/true);
}

PolyBoundSpec monomial_bound(const std::vector<BoundTerm>& terms) {
    PolyBoundSpec spec;
    spec.terms = terms;
    spec.whole_space = true;
    int n = 0;
    for (const BoundTerm& t : terms) n = std::max(n, static_cast<int>(t.exponents.size()));
    spec.validate(std::max(n, 1));
    return spec;
}

namespace {

// Window 2*pi/10 nulls the averaged sin(10 t) and sin(20 t) modulations
// exactly while keeping the slow ones; picked once from scan runs.
constexpr double kDefaultWindow = 0.6283185307179586;

std::vector<Preset> build_presets() {
    std::vector<Preset> out;
    auto add = [&out](const std::string& name, bool duffing, BenchmarkParams p, double delta,
                      double horizon, const std::string& kind) {
        out.push_back(Preset{name, duffing, p, delta, horizon, kind});
    };

    BenchmarkParams p;

    // Window scans of the two Lyapunov-exponent curves.
    p = BenchmarkParams{};
    p.a21 = p.a22 = 0.5;
    p.w21 = 20.0, p.w22 = 0.1;
    add("fig1a", false, p, 0.0, 1000.0, "scan");
    p.w22 = 1.0;
    add("fig1b", false, p, 0.0, 1000.0, "scan");
    p.w22 = 10.0;
    add("fig1c", false, p, 0.0, 1000.0, "scan");
    p = BenchmarkParams{};
    p.a11 = p.a12 = 0.5;
    p.w11 = 20.0, p.w12 = 0.1;
    add("fig1d", false, p, 0.0, 1000.0, "scan");
    p.w12 = 1.0;
    add("fig1e", false, p, 0.0, 1000.0, "scan");
    p = BenchmarkParams{};
    p.a11 = p.a12 = p.a21 = p.a22 = 0.5;
    p.w11 = 20.0, p.w12 = 1.0, p.w21 = 10.0, p.w22 = 1.0;
    add("fig1f", false, p, 0.0, 1000.0, "scan");

    // Van der Pol-like norm bounds.
    p = BenchmarkParams{};
    p.a11 = p.a12 = p.a21 = p.a22 = 0.5;
    p.w11 = 20.0, p.w12 = 1.0, p.w21 = 10.0, p.w22 = 0.5;
    add("fig3a", false, p, kDefaultWindow, 100.0, "bound");
    p = BenchmarkParams{};
    p.a21 = p.a22 = 0.1;
    p.w21 = 10.0, p.w22 = 0.5;
    add("fig3b", false, p, kDefaultWindow, 100.0, "bound");
    p.F1bar = 0.025;
    add("fig3c", false, p, kDefaultWindow, 100.0, "bound");
    p.F1bar = 0.05;
    add("fig3d", false, p, kDefaultWindow, 100.0, "bound");
    p = BenchmarkParams{};
    p.a11 = p.a12 = p.a21 = p.a22 = 0.1;
    p.w11 = 20.0, p.w12 = 1.0, p.w21 = 10.0, p.w22 = 0.5;
    add("fig3e", false, p, kDefaultWindow, 200.0, "region-stability");
    p.F1bar = 0.025;
    add("fig3f", false, p, kDefaultWindow, 200.0, "region-trapping");

    // Duffing-like counterparts.
    p = BenchmarkParams{};
    p.a11 = p.a12 = p.a21 = p.a22 = 0.5;
    p.w11 = 0.94, p.w12 = 2.12, p.w21 = 20.0, p.w22 = 0.3;
    add("fig4a", true, p, kDefaultWindow, 100.0, "bound");
    p = BenchmarkParams{};
    p.a21 = p.a22 = 0.1;
    p.w21 = 10.0, p.w22 = 0.5;
    add("fig4b", true, p, kDefaultWindow, 100.0, "bound");
    p = BenchmarkParams{};
    p.a11 = p.a12 = p.a21 = p.a22 = 0.1;
    p.w11 = 0.94, p.w12 = 2.12, p.w21 = 20.0, p.w22 = 0.3;
    add("fig4c", true, p, kDefaultWindow, 200.0, "region-stability");
    p.F1bar = 0.01;
    add("fig4d", true, p, kDefaultWindow, 100.0, "bound");
    p.F1bar = 0.025;
    add("fig4e", true, p, kDefaultWindow, 100.0, "bound");
    p.F1bar = 0.01;
    add("fig4f", true, p, kDefaultWindow, 200.0, "region-trapping");
    return out;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = build_presets();
    return table;
}

} // namespace

std::optional<Preset> find_preset(const std::string& name) {
    for (const Preset& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const Preset& p : presets()) out.push_back(p.name);
    return out;
}

} // namespace auxbound
