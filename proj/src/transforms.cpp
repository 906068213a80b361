#include "pbmo/transforms.hpp"

#include "pbmo/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pbmo {

namespace {

std::string format_vector(std::span<const double> v) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ")";
    return os.str();
}

double max_abs_difference(const Vector& scalar, const std::vector<Vector>& vec, std::span<const double> w) {
    double worst = 0.0;
    for (std::size_t s = 0; s < scalar.size(); ++s) worst = std::max(worst, std::abs(scalar[s] - dot(w, vec[s])));
    return worst;
}

/// (I - gamma P_pi)^-1 for a deterministic policy, so values for any reward
/// follow from one matrix-vector product.
Matrix resolvent(const MdpInstance& mdp, const DeterministicPolicy& policy) {
    const std::size_t S = mdp.state_count();
    Matrix m = Matrix::identity(S);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = 0; t < S; ++t) m(s, t) -= mdp.discount() * mdp.transition(s, policy.actions[s], t);
    auto inv = invert(m, 1e-14);
    if (!inv) throw NumericalError("singular policy evaluation system");
    return *inv;
}

} // namespace

void validate_order(const RewardOrder& order, std::size_t labels) {
    if (order.ascending.size() != labels)
        throw ValidationError("reward order must list each of the " + std::to_string(labels) + " labels once");
    std::vector<bool> seen(labels, false);
    for (std::size_t l : order.ascending) {
        if (l >= labels || seen[l]) throw ValidationError("reward order is not a permutation of the labels");
        seen[l] = true;
    }
}

MdpInstance canonicalize(const MdpInstance& pbmdp, const RewardOrder& order) {
    const auto& sym = pbmdp.symbolic_reward();
    validate_order(order, sym.labels);
    std::vector<std::size_t> rank(sym.labels);
    for (std::size_t k = 0; k < order.ascending.size(); ++k) rank[order.ascending[k]] = k;
    SymbolicReward out = sym;
    for (auto& row : out.values)
        for (auto& label : row) label = rank[label];
    return pbmdp.with_reward(std::move(out));
}

VectorReward counting_reward(const MdpInstance& pbmdp) {
    const auto& sym = pbmdp.symbolic_reward();
    VectorReward out;
    out.dimension = sym.labels;
    out.values.resize(pbmdp.state_count());
    for (std::size_t s = 0; s < pbmdp.state_count(); ++s)
        for (std::size_t a = 0; a < pbmdp.action_count(); ++a) {
            Vector e(sym.labels, 0.0);
            e[sym.values[s][a]] = 1.0;
            out.values[s].push_back(std::move(e));
        }
    return out;
}

Vector decumulative(std::span<const double> v) {
    Vector out(v.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = v.size(); k-- > 0;) {
        acc += v[k];
        out[k] = acc;
    }
    return out;
}

Vector first_difference(std::span<const double> v) {
    Vector out(v.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] - (k + 1 < v.size() ? v[k + 1] : 0.0);
    return out;
}

Vector difference_weights(std::span<const double> values) {
    Vector w(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) w[k] = values[k] - (k > 0 ? values[k - 1] : 0.0);
    return w;
}

MdpInstance ordered_reward_transform(const MdpInstance& pbmdp, const RewardOrder& order) {
    const MdpInstance canonical = canonicalize(pbmdp, order);
    VectorReward reward = counting_reward(canonical);
    for (auto& row : reward.values)
        for (auto& r : row) r = decumulative(r);
    return canonical.with_reward(std::move(reward));
}

Vector history_count_vector(const MdpInstance& pbmdp, const History& h) {
    const auto& sym = pbmdp.symbolic_reward();
    validate_history(pbmdp, h);
    Vector out(sym.labels, 0.0);
    double weight = 1.0;
    for (std::size_t i = 0; i < h.length(); ++i) {
        out[sym.values[h.states[i]][h.actions[i]]] += weight;
        weight *= pbmdp.discount();
    }
    return out;
}

BasisMatrix history_basis_matrix(const MdpInstance& pbmdp, const OrderedHistories& ordered) {
    const std::size_t d = pbmdp.symbolic_reward().labels;
    if (ordered.histories.size() != d)
        throw ValidationError("ordered histories: expected " + std::to_string(d) + " histories, got " +
                              std::to_string(ordered.histories.size()));
    BasisMatrix basis;
    basis.h = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const Vector r = history_count_vector(pbmdp, ordered.histories[i]);
        for (std::size_t k = 0; k < d; ++k) basis.h(k, i) = r[k];
    }
    auto inv = invert(basis.h, 1e-10);
    if (!inv)
        throw IndependenceError("ordered histories: count vectors are not linearly independent "
                                "(basis matrix is singular)");
    basis.h_inv = std::move(*inv);
    const Matrix product = basis.h * basis.h_inv;
    Matrix residual = product;
    for (std::size_t i = 0; i < d; ++i) residual(i, i) -= 1.0;
    if (inf_norm(residual) > 1e-8)
        throw IndependenceError("ordered histories: basis matrix is too ill-conditioned to invert reliably");
    basis.condition = inf_norm(basis.h) * inf_norm(basis.h_inv);
    return basis;
}

MdpInstance ordered_history_transform(const MdpInstance& pbmdp, const BasisMatrix& basis) {
    const auto& sym = pbmdp.symbolic_reward();
    std::vector<Vector> label_reward(sym.labels);
    for (std::size_t i = 0; i < sym.labels; ++i) label_reward[i] = decumulative(basis.h_inv.column(i));
    VectorReward reward;
    reward.dimension = sym.labels;
    reward.values.resize(pbmdp.state_count());
    for (std::size_t s = 0; s < pbmdp.state_count(); ++s)
        for (std::size_t a = 0; a < pbmdp.action_count(); ++a)
            reward.values[s].push_back(label_reward[sym.values[s][a]]);
    return pbmdp.with_reward(std::move(reward));
}

MdpInstance ordered_history_transform(const MdpInstance& pbmdp, const OrderedHistories& ordered) {
    return ordered_history_transform(pbmdp, history_basis_matrix(pbmdp, ordered));
}

MdpInstance substitute_values(const MdpInstance& pbmdp, std::span<const double> values) {
    const auto& sym = pbmdp.symbolic_reward();
    if (values.size() != sym.labels)
        throw ValidationError("expected " + std::to_string(sym.labels) + " label values, got " +
                              std::to_string(values.size()));
    ScalarReward reward;
    reward.values.assign(pbmdp.state_count(), Vector(pbmdp.action_count()));
    for (std::size_t s = 0; s < pbmdp.state_count(); ++s)
        for (std::size_t a = 0; a < pbmdp.action_count(); ++a) reward.values[s][a] = values[sym.values[s][a]];
    return pbmdp.with_reward(std::move(reward));
}

LemmaReport verify_lemma1(const MdpInstance& pbmdp, const RewardOrder& order, std::span<const double> values,
                          const Policy& policy, double tol) {
    const MdpInstance canonical = canonicalize(pbmdp, order);
    if (values.size() != canonical.symbolic_reward().labels)
        throw ValidationError("expected one value per label");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (!(values[k] > values[k - 1]))
            throw ValidationError("label values must be strictly increasing in the known order");

    const Vector v = evaluate_policy(substitute_values(canonical, values), policy, tol);
    const auto counting = vector_evaluate(canonical.with_reward(counting_reward(canonical)), policy, tol);
    const auto decum = vector_evaluate(ordered_reward_transform(pbmdp, order), policy, tol);

    LemmaReport report;
    report.counting_residual = max_abs_difference(v, counting.values, values);
    report.decumulative_residual = max_abs_difference(v, decum.values, difference_weights(values));
    return report;
}

Vector history_values(const BasisMatrix& basis, std::span<const double> values) {
    return basis.h.transposed() * values;
}

LemmaReport verify_lemma2(const MdpInstance& pbmdp, const OrderedHistories& ordered,
                          std::span<const double> values, const Policy& policy, double tol,
                          double max_condition) {
    const BasisMatrix basis = history_basis_matrix(pbmdp, ordered);
    if (basis.condition > max_condition) {
        std::ostringstream os;
        os << "ordered histories: basis condition estimate " << basis.condition << " exceeds " << max_condition;
        throw ValidationError(os.str());
    }
    if (values.size() != basis.h.rows()) throw ValidationError("expected one value per label");
    const Vector r = history_values(basis, values);
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1]))
            throw ValidationError("history values " + format_vector(r) +
                                  " are not strictly increasing; the supplied ranking contradicts x");

    const Vector v = evaluate_policy(substitute_values(pbmdp, values), policy, tol);
    const auto counting = vector_evaluate(pbmdp.with_reward(counting_reward(pbmdp)), policy, tol);
    const auto transformed = vector_evaluate(ordered_history_transform(pbmdp, basis), policy, tol);

    LemmaReport report;
    report.counting_residual = max_abs_difference(v, counting.values, values);
    report.decumulative_residual = max_abs_difference(v, transformed.values, difference_weights(r));
    return report;
}

SoundnessReport dominance_soundness_check(const MdpInstance& pbmdp, const MdpInstance& transformed,
                                          const std::vector<Vector>& sampled_values, std::size_t cap,
                                          double tol) {
    const auto& sym = pbmdp.symbolic_reward();
    transformed.vector_reward();
    const auto policies = enumerate_deterministic_policies(pbmdp, cap);
    const std::size_t S = pbmdp.state_count();

    std::vector<VectorValueFunction> vec;
    std::vector<Matrix> resolvents;
    for (const auto& p : policies) {
        vec.push_back(vector_evaluate(transformed, p, 1e-12));
        resolvents.push_back(resolvent(pbmdp, p));
    }

    struct Triple {
        std::size_t better, worse, state;
    };
    std::vector<Triple> dominant;
    for (std::size_t i = 0; i < policies.size(); ++i)
        for (std::size_t j = 0; j < policies.size(); ++j) {
            if (i == j) continue;
            for (std::size_t s = 0; s < S; ++s)
                if (pareto_dominates(vec[i].values[s], vec[j].values[s])) dominant.push_back({i, j, s});
        }

    SoundnessReport report;
    report.dominant_pairs = dominant.size();
    for (const Vector& x : sampled_values) {
        if (x.size() != sym.labels) throw ValidationError("sampled values must have one entry per label");
        // exact scalar values: v_pi = (I - gamma P_pi)^-1 r_pi
        std::vector<Vector> scalar(policies.size());
        double scale = 1.0;
        for (std::size_t i = 0; i < policies.size(); ++i) {
            Vector r(S);
            for (std::size_t s = 0; s < S; ++s) r[s] = x[sym.values[s][policies[i].actions[s]]];
            scalar[i] = resolvents[i] * r;
            scale = std::max(scale, inf_norm(scalar[i]));
        }
        for (const auto& t : dominant) {
            ++report.checks;
            if (scalar[t.better][t.state] < scalar[t.worse][t.state] - tol * scale) {
                std::ostringstream os;
                os.precision(12);
                os << "policy #" << t.better << " dominates policy #" << t.worse << " at state " << t.state
                   << " (" << format_vector(vec[t.better].values[t.state]) << " vs "
                   << format_vector(vec[t.worse].values[t.state]) << ") but under x = " << format_vector(x)
                   << " its value " << scalar[t.better][t.state] << " is below " << scalar[t.worse][t.state];
                report.passed = false;
                report.counterexample = os.str();
                return report;
            }
        }
    }
    return report;
}

Vector sample_increasing_values(std::size_t d, Rng& rng, double lo, double hi) {
    Vector x(d);
    for (auto& v : x) v = rng.uniform(lo, hi);
    std::sort(x.begin(), x.end());
    // ties are astronomically unlikely, but the contract is strict
    for (std::size_t k = 1; k < d; ++k)
        if (!(x[k] > x[k - 1])) x[k] = std::nextafter(x[k - 1], hi);
    return x;
}

Vector values_from_history_values(const BasisMatrix& basis, std::span<const double> history_values) {
    // r = H^T x  =>  x = (H^-1)^T r
    return basis.h_inv.transposed() * history_values;
}

} // namespace pbmo
