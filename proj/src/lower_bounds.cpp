#include "msl/lower_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace msl {

PackingCode varshamov_gilbert(int s, int j_target, RandomSeed seed) {
    if (s < 8) throw Error("varshamov_gilbert: s must be at least 8");
    if (j_target < 0) throw Error("varshamov_gilbert: j_target must be nonnegative");
    PackingCode code;
    code.s = s;
    code.requested = j_target;
    code.words.push_back(std::vector<std::uint8_t>(s, 0));

    RngStream rng(seed);
    long rejections = 0;
    const long budget = 100L * std::max(j_target, 1);
    std::vector<std::uint8_t> w(s);
    while (static_cast<int>(code.words.size()) < j_target + 1 && rejections < budget) {
        for (int i = 0; i < s; ++i) w[i] = rng.bernoulli(0.5) ? 1 : 0;
        bool ok = true;
        for (const auto& kept : code.words) {
            int dist = 0;
            for (int i = 0; i < s; ++i) dist += (w[i] != kept[i]);
            if (8 * dist < s) {
                ok = false;
                break;
            }
        }
        if (ok) {
            code.words.push_back(w);
        } else {
            ++rejections;
        }
    }
    code.starved = static_cast<int>(code.words.size()) < j_target + 1;
    return code;
}

std::string to_string(LfcVariant v) {
    switch (v) {
        case LfcVariant::Weighted: return "weighted";
        case LfcVariant::Unweighted: return "unweighted";
        case LfcVariant::UnweightedViolated: return "unweighted-violated";
    }
    return "?";
}

namespace {

// Round-robin the pure nodes (descending theta) over communities, then emit
// node positions: mixed block first, then community blocks.
std::vector<int> arrange_nodes(const std::vector<int>& mixed, std::vector<int> pure_desc, int k) {
    std::vector<std::vector<int>> comm(k);
    for (std::size_t t = 0; t < pure_desc.size(); ++t)
        comm[t % k].push_back(pure_desc[t]);
    std::vector<int> order = mixed;
    for (int c = 0; c < k; ++c)
        for (int i : comm[c]) order.push_back(i);
    return order;
}

}  // namespace

LfcEnsemble build_lfc(const DegreeParams& theta, int k, double beta_n, double c0, int j_target,
                      LfcVariant variant, RandomSeed seed, double c_check, double c_n) {
    const int n = theta.n();
    if (k < 2) throw Error("build_lfc: K must be at least 2");
    if (!(beta_n > 0.0 && beta_n < 1.0)) throw Error("build_lfc: beta_n must lie in (0,1)");
    if (c0 <= 0.0) throw Error("build_lfc: c0 must be positive");

    LfcEnsemble ens;
    ens.variant = variant;
    ens.beta_n = beta_n;

    // P* = beta I + (1 - beta) 11'.
    ens.p_star.p = beta_n * Matrix::Identity(k, k) + (1.0 - beta_n) * Matrix::Ones(k, k);

    const double theta_bar = theta.theta_bar;
    ens.err_n = k * std::sqrt(static_cast<double>(k)) /
                (beta_n * std::sqrt(static_cast<double>(n) * theta_bar * theta_bar));
    const double err2 = ens.err_n * ens.err_n;

    Vector eta = theta.theta / theta_bar;

    // ---- node arrangement and the size of the perturbed block ----
    std::vector<int> mixed, order;
    if (variant == LfcVariant::Weighted) {
        const double fn_err2 =
            static_cast<double>((eta.array() <= err2).count()) / static_cast<double>(n);
        ens.feasible = fn_err2 <= c_check;
        if (!ens.feasible) {
            std::ostringstream os;
            os << "F_n(err_n^2) = " << fn_err2 << " exceeds c_check = " << c_check;
            ens.feasibility_note = os.str();
        }
        const double c = 0.5 * (1.0 + c_check);
        const int n1 = static_cast<int>(std::floor(c * n / k));
        ens.n0 = n - k * n1;

        std::vector<int> desc(n);
        std::iota(desc.begin(), desc.end(), 0);
        std::sort(desc.begin(), desc.end(), [&](int a, int b) {
            if (theta.theta(a) != theta.theta(b)) return theta.theta(a) > theta.theta(b);
            return a < b;
        });
        const int top_reserved =
            std::min(static_cast<int>(std::floor((c - c_check) * n)), n - ens.n0);
        // Mixed rows take the smallest still-qualifying degrees (eta >= err_n^2)
        // outside the reserved top block; the rest stay pure.
        std::vector<char> is_mixed(n, 0);
        int need = ens.n0;
        for (int t = n - 1; t >= top_reserved && need > 0; --t) {
            const int i = desc[t];
            if (eta(i) >= err2) {
                is_mixed[i] = 1;
                mixed.push_back(i);
                --need;
            }
        }
        if (need > 0) {
            ens.feasible = false;
            std::ostringstream os;
            os << ens.feasibility_note << (ens.feasibility_note.empty() ? "" : "; ")
               << need << " mixed slots fall below eta >= err_n^2";
            ens.feasibility_note = os.str();
            for (int t = n - 1; t >= 0 && need > 0; --t) {
                const int i = desc[t];
                if (!is_mixed[i]) {
                    is_mixed[i] = 1;
                    mixed.push_back(i);
                    --need;
                }
            }
        }
        std::reverse(mixed.begin(), mixed.end());  // ascending theta
        std::vector<int> pure_desc;
        for (int i : desc)
            if (!is_mixed[i]) pure_desc.push_back(i);
        order = arrange_nodes(mixed, std::move(pure_desc), k);
    } else {
        std::vector<int> asc(n);
        std::iota(asc.begin(), asc.end(), 0);
        std::sort(asc.begin(), asc.end(), [&](int a, int b) {
            if (theta.theta(a) != theta.theta(b)) return theta.theta(a) < theta.theta(b);
            return a < b;
        });
        std::vector<char> is_mixed(n, 0);
        if (variant == LfcVariant::Unweighted) {
            for (int i : asc) {
                const double et = std::min(eta(i), 1.0);
                if (et >= err2 && et < c_n) {
                    is_mixed[i] = 1;
                    mixed.push_back(i);
                }
            }
            ens.feasible = !mixed.empty();
            if (!ens.feasible) ens.feasibility_note = "M0 band [err_n^2, c_n) is empty";
        } else {
            for (int i : asc) {
                if (eta(i) <= err2) {
                    is_mixed[i] = 1;
                    mixed.push_back(i);
                }
            }
            ens.feasible = !mixed.empty();
            if (!ens.feasible) ens.feasibility_note = "no nodes with eta <= err_n^2";
        }
        ens.n0 = static_cast<int>(mixed.size());
        std::vector<int> pure_desc;
        for (auto it = asc.rbegin(); it != asc.rend(); ++it)
            if (!is_mixed[*it]) pure_desc.push_back(*it);
        order = arrange_nodes(mixed, std::move(pure_desc), k);
    }

    ens.original_index = order;
    Vector reordered(n);
    for (int pos = 0; pos < n; ++pos) reordered(pos) = theta.theta(order[pos]);
    ens.theta = DegreeParams::from(reordered);

    // ---- Pi*: n0 uniform rows then the community blocks ----
    ens.pi_star.pi = Matrix::Zero(n, k);
    for (int i = 0; i < ens.n0; ++i) ens.pi_star.pi.row(i).setConstant(1.0 / k);
    {
        const int rest = n - ens.n0;
        const int base = rest / k, extra = rest % k;
        int row = ens.n0;
        for (int c = 0; c < k; ++c) {
            const int block = base + (c < extra ? 1 : 0);
            for (int t = 0; t < block; ++t) ens.pi_star.pi(row++, c) = 1.0;
        }
    }

    // ---- packing and the perturbation matrices ----
    ens.m = ens.n0 / 2;
    ens.r = k / 2;
    const int s = ens.m * ens.r;
    if (s < 8) {
        std::ostringstream os;
        os << "packing length m*r = " << s << " below 8 (n0 = " << ens.n0 << ", K = " << k << ")";
        throw Error("build_lfc: " + os.str());
    }
    ens.packing = varshamov_gilbert(s, j_target, seed);

    const int j_count = static_cast<int>(ens.packing.words.size());
    std::vector<Matrix> gammas(j_count);
    for (int j = 0; j < j_count; ++j) {
        Matrix g = Matrix::Zero(n, k);
        const auto& w = ens.packing.words[j];
        for (int t = 0; t < s; ++t) {
            const int row = t / ens.r, col = t % ens.r;
            const double h = static_cast<double>(w[t]);
            g(row, col) = h;
            g(row, ens.r + col) = -h;
            g(ens.m + row, col) = -h;
            g(ens.m + row, ens.r + col) = h;
        }
        gammas[j] = std::move(g);
    }

    // Row scale of the perturbation per node position.
    ens.gamma_n = c0 * std::sqrt(static_cast<double>(k)) /
                  std::sqrt(static_cast<double>(n) * theta_bar * beta_n * beta_n);
    Vector row_scale(n);
    for (int i = 0; i < n; ++i) {
        switch (variant) {
            case LfcVariant::Weighted:
                row_scale(i) = ens.gamma_n / std::sqrt(ens.theta.theta(i));
                break;
            case LfcVariant::Unweighted:
                row_scale(i) = ens.gamma_n / std::sqrt(std::min(ens.theta.theta(i), theta_bar));
                break;
            case LfcVariant::UnweightedViolated:
                row_scale(i) = c0 / k;
                break;
        }
    }

    // Halve c0 until every member row stays inside the simplex.
    double shrink = 1.0;
    double max_violation = 0.0;
    for (int attempt = 0; attempt <= 80; ++attempt) {
        max_violation = 0.0;
        for (int j = 1; j < j_count && max_violation <= 0.0; ++j) {
            for (int i = 0; i < 2 * ens.m && max_violation <= 0.0; ++i) {
                for (int c = 0; c < 2 * ens.r; ++c) {
                    const double v = ens.pi_star.pi(i, c) + shrink * row_scale(i) * gammas[j](i, c);
                    if (v < 0.0) max_violation = std::max(max_violation, -v);
                    if (v > 1.0) max_violation = std::max(max_violation, v - 1.0);
                }
            }
        }
        if (max_violation <= 0.0) break;
        shrink *= 0.5;
        ++ens.c0_halvings;
    }
    if (max_violation > 0.0) {
        std::ostringstream os;
        os << "member rows leave the simplex by " << max_violation << " even after "
           << ens.c0_halvings << " halvings of c0";
        throw InvalidPerturbation(os.str());
    }
    ens.c0 = c0 * shrink;
    ens.gamma_n *= shrink;
    row_scale *= shrink;

    ens.members.reserve(j_count);
    for (int j = 0; j < j_count; ++j) {
        MembershipMatrix member;
        member.pi = ens.pi_star.pi;
        for (int i = 0; i < 2 * ens.m; ++i)
            for (int c = 0; c < 2 * ens.r; ++c)
                member.pi(i, c) += row_scale(i) * gammas[j](i, c);
        member.validate();
        ens.members.push_back(std::move(member));
    }
    return ens;
}

KlResult kl_divergence(const ExpectedAdjacency& omega_a, const ExpectedAdjacency& omega_b) {
    const int n = omega_a.n();
    if (omega_b.n() != n) throw Error("kl_divergence: dimension mismatch");
    KlResult out;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            const double a = omega_a.omega(i, j);
            const double b = omega_b.omega(i, j);
            if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
                throw Error("kl_divergence: entries must lie in [0,1]");
            if (a == b) continue;
            if (a > 0.0) {
                if (b == 0.0) {
                    out.infinite = true;
                    continue;
                }
                out.nats += a * std::log(a / b);
            }
            if (a < 1.0) {
                if (b == 1.0) {
                    out.infinite = true;
                    continue;
                }
                out.nats += (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
            }
        }
    }
    return out;
}

std::string LfcReport::summary() const {
    std::ostringstream os;
    os << "loss spec: p = " << loss_spec.p << ", q = " << loss_spec.q << "\n"
       << "min pairwise loss = " << min_pairwise_loss
       << " (ratio vs target scale = " << min_pairwise_ratio << ")\n"
       << "sum KL = " << kl_sum << ", KL/(J log J) = ";
    if (kl_ratio_defined)
        os << kl_ratio;
    else
        os << "undefined";
    os << " with J = " << j_nonzero << "\n"
       << "min member |lambda_K(P*G)| = " << min_member_beta_n << "\n"
       << conditions.summary();
    return os.str();
}

LfcReport lfc_report(const LfcEnsemble& ensemble) {
    LfcReport rep;
    rep.loss_spec = ensemble.variant == LfcVariant::Weighted ? LossSpec::weighted_l1()
                                                             : LossSpec::unweighted_l1();
    const int count = static_cast<int>(ensemble.members.size());
    rep.j_nonzero = count - 1;

    double min_loss = std::numeric_limits<double>::infinity();
    for (int a = 0; a < count; ++a) {
        for (int b = a + 1; b < count; ++b) {
            const auto al = loss(ensemble.members[a].pi, ensemble.members[b].pi, &ensemble.theta,
                                 rep.loss_spec);
            min_loss = std::min(min_loss, al.value);
        }
    }
    rep.min_pairwise_loss = count >= 2 ? min_loss : 0.0;
    const double target_scale = ensemble.variant == LfcVariant::UnweightedViolated
                                    ? static_cast<double>(ensemble.n0) / ensemble.theta.n()
                                    : ensemble.err_n;
    rep.min_pairwise_ratio = target_scale > 0.0 ? rep.min_pairwise_loss / target_scale : 0.0;

    auto omega0 = build_omega_clipped(ensemble.theta, ensemble.members[0], ensemble.p_star);
    bool any_infinite = false;
    for (int j = 1; j < count; ++j) {
        auto omj = build_omega_clipped(ensemble.theta, ensemble.members[j], ensemble.p_star);
        const auto kl = kl_divergence(omj, omega0);
        any_infinite |= kl.infinite;
        rep.kl_sum += kl.nats;
    }
    if (rep.j_nonzero > 1 && !any_infinite) {
        rep.kl_ratio_defined = true;
        rep.kl_ratio = rep.kl_sum / (rep.j_nonzero * std::log(static_cast<double>(rep.j_nonzero)));
    }

    rep.conditions = check_conditions(ensemble.theta, ensemble.members[0], ensemble.p_star, 1.0);
    rep.min_member_beta_n = std::numeric_limits<double>::infinity();
    for (const auto& member : ensemble.members) {
        auto om = build_omega_clipped(ensemble.theta, member, ensemble.p_star);
        Matrix g = compute_G(ensemble.theta, member, om, 1.0);
        auto pg = delta_n(ensemble.p_star, g);
        rep.min_member_beta_n = std::min(rep.min_member_beta_n, pg.beta_n);
    }
    return rep;
}

}  // namespace msl
