#include "msl/degree_profiles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "msl/spectral.hpp"

namespace msl {

DegreeProfile DegreeProfile::uniform(double lo, double hi) {
    DegreeProfile p;
    p.kind = Kind::Uniform;
    p.a = lo;
    p.b = hi;
    p.validate();
    return p;
}

DegreeProfile DegreeProfile::pareto(double scale, double shape) {
    DegreeProfile p;
    p.kind = Kind::Pareto;
    p.a = scale;
    p.b = shape;
    p.validate();
    return p;
}

DegreeProfile DegreeProfile::gamma(double shape, double rate) {
    DegreeProfile p;
    p.kind = Kind::Gamma;
    p.a = shape;
    p.b = rate;
    p.validate();
    return p;
}

DegreeProfile DegreeProfile::point_mixture(std::vector<double> weights, std::vector<double> atoms) {
    DegreeProfile p;
    p.kind = Kind::PointMixture;
    p.weights = std::move(weights);
    p.atoms = std::move(atoms);
    p.validate();
    return p;
}

void DegreeProfile::validate() const {
    switch (kind) {
        case Kind::Uniform:
            if (!(0.0 < a && a < b)) throw Error("uniform profile requires 0 < a < b");
            break;
        case Kind::Pareto:
            if (!(a > 0.0 && b > 0.0)) throw Error("pareto profile requires scale > 0 and shape > 0");
            break;
        case Kind::Gamma:
            if (!(a > 0.0 && b > 0.0)) throw Error("gamma profile requires shape > 0 and rate > 0");
            break;
        case Kind::PointMixture: {
            if (weights.empty() || weights.size() != atoms.size())
                throw Error("mixture profile requires matching weights and atoms");
            double sum = 0.0;
            for (double w : weights) {
                if (w <= 0.0) throw Error("mixture weights must be positive");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw Error("mixture weights must sum to 1");
            for (double x : atoms)
                if (x <= 0.0) throw Error("mixture atoms must be positive");
            break;
        }
    }
}

namespace {

std::string lower_nospace(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw Error("bad number in profile: '" + s + "'");
    return v;
}

}  // namespace

DegreeProfile DegreeProfile::parse(const std::string& text) {
    const std::string s = lower_nospace(text);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw Error("bad degree profile: '" + text + "'");
    const std::string name = s.substr(0, open);
    const std::string body = s.substr(open + 1, s.size() - open - 2);
    const auto args = split(body, ',');
    if (name == "uniform") {
        if (args.size() != 2) throw Error("uniform(a,b) takes two arguments");
        return uniform(parse_number(args[0]), parse_number(args[1]));
    }
    if (name == "pareto") {
        if (args.size() != 2) throw Error("pareto(scale,shape) takes two arguments");
        return pareto(parse_number(args[0]), parse_number(args[1]));
    }
    if (name == "gamma") {
        if (args.size() != 2) throw Error("gamma(shape,rate) takes two arguments");
        return gamma(parse_number(args[0]), parse_number(args[1]));
    }
    if (name == "pointmass") {
        if (args.size() != 1) throw Error("pointmass(x) takes one argument");
        return point_mass(parse_number(args[0]));
    }
    if (name == "mixture") {
        std::vector<double> w, x;
        for (const auto& part : args) {
            const auto wx = split(part, ':');
            if (wx.size() != 2) throw Error("mixture entries are weight:atom");
            w.push_back(parse_number(wx[0]));
            x.push_back(parse_number(wx[1]));
        }
        return point_mixture(std::move(w), std::move(x));
    }
    throw Error("unknown degree profile '" + text + "'");
}

std::string DegreeProfile::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Uniform: os << "uniform(" << a << "," << b << ")"; break;
        case Kind::Pareto: os << "pareto(" << a << "," << b << ")"; break;
        case Kind::Gamma: os << "gamma(" << a << "," << b << ")"; break;
        case Kind::PointMixture: {
            os << "mixture(";
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (i) os << ",";
                os << weights[i] << ":" << atoms[i];
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

DegreeParams sample_degrees(const DegreeProfile& profile, int n, double target_norm,
                            RandomSeed seed) {
    profile.validate();
    if (n <= 0) throw Error("sample_degrees: n must be positive");
    if (target_norm <= 0.0) throw Error("sample_degrees: target_norm must be positive");
    RngStream rng(seed);

    auto draw_all = [&](Vector& theta0) {
        for (int i = 0; i < n; ++i) {
            double v = 0.0;
            switch (profile.kind) {
                case DegreeProfile::Kind::Uniform:
                    v = rng.uniform(profile.a, profile.b);
                    break;
                case DegreeProfile::Kind::Pareto:
                    // Inverse CDF: scale * U^{-1/shape} with U in (0,1].
                    v = profile.a * std::pow(rng.uniform01_open_low(), -1.0 / profile.b);
                    break;
                case DegreeProfile::Kind::Gamma:
                    v = rng.gamma(profile.a) / profile.b;
                    break;
                case DegreeProfile::Kind::PointMixture: {
                    double u = rng.uniform01();
                    std::size_t idx = 0;
                    double acc = profile.weights[0];
                    while (idx + 1 < profile.weights.size() && u >= acc)
                        acc += profile.weights[++idx];
                    v = profile.atoms[idx];
                    break;
                }
            }
            theta0(i) = std::max(v, 1e-300);  // underflow guard
        }
    };

    Vector theta0(n);
    draw_all(theta0);
    double nrm = theta0.norm();
    if (nrm == 0.0 || !std::isfinite(nrm)) {
        draw_all(theta0);
        nrm = theta0.norm();
        if (nrm == 0.0 || !std::isfinite(nrm))
            throw DegenerateDraw("sample_degrees: degenerate theta0 draw twice in a row");
    }
    return DegreeParams::from(theta0 * (target_norm / nrm));
}

double EmpiricalCdf::operator()(double t) const {
    const auto it = std::upper_bound(eta.data(), eta.data() + eta.size(), t);
    return static_cast<double>(it - eta.data()) / static_cast<double>(eta.size());
}

EmpiricalCdf empirical_cdf(const DegreeParams& theta) {
    EmpiricalCdf cdf;
    cdf.eta = theta.theta / theta.theta_bar;
    std::sort(cdf.eta.data(), cdf.eta.data() + cdf.eta.size());
    return cdf;
}

double baseline_rate(const RateInputs& inputs) {
    if (inputs.n <= 0 || inputs.k <= 0 || inputs.theta_bar <= 0.0 || inputs.delta_n <= 0.0)
        throw Error("baseline_rate: inputs must be positive");
    const double k = inputs.k;
    return k * std::sqrt(k) /
           (inputs.delta_n * std::sqrt(static_cast<double>(inputs.n) * inputs.theta_bar * inputs.theta_bar));
}

double optimal_rate_integral(const EmpiricalCdf& cdf, double err_n) {
    if (err_n <= 0.0) throw Error("optimal_rate_integral: err_n must be positive");
    double sum = 0.0;
    for (int i = 0; i < cdf.n(); ++i) {
        const double t = std::min(cdf.eta(i), 1.0);
        sum += std::min(err_n / std::sqrt(t), 1.0);
    }
    return sum / cdf.n();
}

Matrix compute_G(const DegreeParams& theta, const MembershipMatrix& pi,
                 const ExpectedAdjacency& omega, double tau) {
    const int n = theta.n();
    if (pi.n() != n || omega.n() != n) throw Error("compute_G: dimension mismatch");
    Vector h0 = expected_h0(omega, tau);
    if ((h0.array() <= 0.0).any()) throw Error("compute_G: H0 has a nonpositive entry");
    Vector w = theta.theta.array() / h0.array().sqrt();  // Theta H0^{-1/2}
    Matrix scaled = w.asDiagonal() * pi.pi;              // H0^{-1/2} Theta Pi
    Matrix g = static_cast<double>(pi.k()) * (scaled.transpose() * scaled);
    // Gram form: symmetrize away rounding noise.
    return 0.5 * (g + g.transpose());
}

PgSpectrum delta_n(const MixingMatrix& p, const Matrix& g) {
    const int k = p.k();
    if (g.rows() != k || g.cols() != k) throw Error("delta_n: P and G dimensions differ");
    // G is PSD (Gram form), so PG is similar to G^{1/2} P G^{1/2} and has a
    // real spectrum computable with the symmetric solver.
    auto eg = top_k_eigen(g, k);
    const double gmax = eg.values.cwiseAbs().maxCoeff();
    Vector lam = eg.values;
    for (int i = 0; i < k; ++i) {
        if (lam(i) < -1e-12 * std::max(gmax, 1.0)) throw Error("delta_n: G is not PSD");
        lam(i) = std::max(lam(i), 0.0);
    }
    Matrix sqrt_g = eg.vectors * lam.cwiseSqrt().asDiagonal() * eg.vectors.transpose();
    Matrix sym = sqrt_g * p.p * sqrt_g;
    sym = 0.5 * (sym + sym.transpose());
    auto epg = top_k_eigen(sym, k);

    PgSpectrum out;
    out.eigenvalues = epg.values;
    out.alpha_n = epg.values(0);
    out.beta_n = std::abs(epg.values(k - 1));
    if (out.beta_n < 1e-12)
        throw SingularPG("delta_n: |lambda_K(PG)| below 1e-12");
    out.delta_n = std::min(out.alpha_n / std::sqrt(static_cast<double>(k)), out.beta_n);

    // Right Perron vector of PG: if (G^{1/2} P G^{1/2}) u = lambda_1 u then
    // P G^{1/2} u is a lambda_1-eigenvector of PG.
    Vector eta = p.p * (sqrt_g * epg.vectors.col(0));
    double nrm = eta.norm();
    if (nrm > 0.0) eta /= nrm;
    if (eta.sum() < 0.0) eta = -eta;
    out.perron = eta;
    return out;
}

std::string ConditionReport::summary() const {
    std::ostringstream os;
    os << "||G|| = " << g_norm << ", ||G^-1|| = " << g_inv_norm
       << ", degree balance = " << degree_balance << "\n"
       << "alpha_n = " << alpha_n << ", beta_n = " << beta_n << ", delta_n = " << delta_n << "\n"
       << "eigengap ratio = " << eigengap_ratio << ", perron ratio = " << perron_ratio << "\n"
       << "pure-node degree ratio = " << pure_degree_ratio;
    return os.str();
}

ConditionReport check_conditions(const DegreeParams& theta, const MembershipMatrix& pi,
                                 const MixingMatrix& p, double tau) {
    ConditionReport rep;
    auto omega = build_omega_clipped(theta, pi, p);
    Matrix g = compute_G(theta, pi, omega, tau);
    auto eg = top_k_eigen(g, pi.k());
    rep.g_norm = eg.values.cwiseAbs().maxCoeff();
    const double gmin = eg.values.cwiseAbs().minCoeff();
    rep.g_inv_norm = gmin > 0.0 ? 1.0 / gmin : std::numeric_limits<double>::infinity();

    Vector mass = pi.pi.transpose() * theta.theta;
    rep.degree_balance = mass.minCoeff() / theta.theta.lpNorm<1>();

    auto pg = delta_n(p, g);
    rep.alpha_n = pg.alpha_n;
    rep.beta_n = pg.beta_n;
    rep.delta_n = pg.delta_n;
    rep.eigengap_ratio =
        pi.k() > 1 ? pg.eigenvalues.tail(pi.k() - 1).cwiseAbs().maxCoeff() / pg.alpha_n : 0.0;
    rep.perron_ratio = pg.perron.minCoeff() / pg.perron.maxCoeff();

    double worst = std::numeric_limits<double>::infinity();
    for (int c = 0; c < pi.k(); ++c) {
        double best = 0.0;
        for (int i = 0; i < pi.n(); ++i)
            if (pi.pi(i, c) == 1.0) best = std::max(best, theta.theta(i) / theta.theta_bar);
        worst = std::min(worst, best);
    }
    rep.pure_degree_ratio = worst;
    return rep;
}

}  // namespace msl
