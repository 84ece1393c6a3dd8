#include "osmd/mts.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace osmd {

std::vector<int> geometric_checkpoints(int n) {
    std::vector<int> out;
    for (long long t = 1; t < n; t *= 2) out.push_back(static_cast<int>(t));
    if (n >= 1) out.push_back(n);
    return out;
}

void AtomicPrior::validate() const {
    require(!weights.empty(), "prior: no atoms");
    require(weights.size() == sequences.size(), "prior: weights and sequences differ in count");
    const int n = horizon();
    require(n >= 1, "prior: empty loss sequences");
    const int d = dim();
    require(d >= 1, "prior: empty loss vectors");
    double total = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        require(weights[j] >= 0.0, "prior: negative weight on atom " + std::to_string(j));
        total += weights[j];
        require(static_cast<int>(sequences[j].size()) == n, "prior: atom " + std::to_string(j) + " has a different horizon");
        for (const auto& loss : sequences[j])
            require(loss.size() == d, "prior: atom " + std::to_string(j) + " has a loss of the wrong dimension");
    }
    require(std::abs(total - 1.0) <= 1e-12, "prior: weights do not sum to one");
}

AtomicPrior AtomicPrior::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("prior: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
        throw DomainError("prior: expected an object with an \"atoms\" array");
    AtomicPrior prior;
    for (const auto& atom : doc["atoms"]) {
        if (!atom.contains("weight") || !atom.contains("losses"))
            throw DomainError("prior: each atom needs \"weight\" and \"losses\"");
        prior.weights.push_back(atom["weight"].get<double>());
        std::vector<Vector> sequence;
        for (const auto& row : atom["losses"]) {
            const auto values = row.get<std::vector<double>>();
            sequence.push_back(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
        }
        prior.sequences.push_back(std::move(sequence));
    }
    prior.validate();
    if (doc.contains("horizon") && doc["horizon"].get<int>() != prior.horizon())
        throw DomainError("prior: \"horizon\" does not match the loss sequences");
    return prior;
}

AtomicPrior AtomicPrior::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open prior file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

Posterior Posterior::from_prior(const AtomicPrior& prior) {
    return {Eigen::Map<const Vector>(prior.weights.data(), static_cast<Eigen::Index>(prior.weights.size()))};
}

std::size_t optimal_action(const std::vector<Vector>& sequence) {
    require(!sequence.empty(), "optimal_action: empty sequence");
    Vector total = Vector::Zero(sequence.front().size());
    for (const auto& loss : sequence) total += loss;
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < total.size(); ++i)
        if (total[i] < total[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
    return best;
}

Vector optimal_point(const ProblemInstance& instance, const std::vector<Vector>& sequence) {
    if (instance.finite_actions()) {
        Vector a = Vector::Zero(instance.dim);
        a[static_cast<Eigen::Index>(optimal_action(sequence))] = 1.0;
        return a;
    }
    Vector total = Vector::Zero(instance.dim);
    for (const auto& loss : sequence) total += loss;
    return best_action(instance, total);
}

namespace {

Observation observe(const ProblemInstance& instance, std::size_t action, const VectorRef& x, const VectorRef& loss) {
    if (instance.finite_actions()) return signal(instance, action, loss);
    return signal(instance, x, loss);
}

std::vector<Vector> atom_optima(const AtomicPrior& prior, const ProblemInstance& instance) {
    std::vector<Vector> out;
    for (const auto& sequence : prior.sequences) out.push_back(optimal_point(instance, sequence));
    return out;
}

void check_pairing(const AtomicPrior& prior, const ProblemInstance& instance) {
    prior.validate();
    require(prior.dim() == instance.dim, "MTS: prior dimension does not match the instance");
}

std::size_t sample_index(const VectorRef& probabilities, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] <= 0.0) continue;
        last = static_cast<std::size_t>(i);
        acc += probabilities[i];
        if (u < acc) return last;
    }
    return last;
}

}  // namespace

Posterior posterior_update(const Posterior& posterior, const AtomicPrior& prior, const ProblemInstance& instance,
                           std::size_t action, const Observation& observed, int t) {
    require(t >= 1 && t <= prior.horizon(), "posterior_update: round outside the horizon");
    require(posterior.weights.size() == static_cast<Eigen::Index>(prior.size()), "posterior_update: size mismatch");
    Posterior next = posterior;
    const Vector none = Vector::Zero(instance.dim);
    for (std::size_t j = 0; j < prior.size(); ++j) {
        auto& w = next.weights[static_cast<Eigen::Index>(j)];
        if (w == 0.0) continue;
        const Vector& loss = prior.sequences[j][static_cast<std::size_t>(t - 1)];
        if (!same_observation(observe(instance, action, none, loss), observed)) w = 0.0;
    }
    const double total = next.weights.sum();
    if (!(total > 0.0)) throw DomainError("posterior_update: observation has zero probability under every atom");
    next.weights /= total;
    return next;
}

Vector mts_iterate(const Posterior& posterior, const std::vector<Vector>& atom_optima) {
    require(!atom_optima.empty(), "mts_iterate: no atoms");
    Vector x = Vector::Zero(atom_optima.front().size());
    for (std::size_t j = 0; j < atom_optima.size(); ++j) x += posterior.weights[static_cast<Eigen::Index>(j)] * atom_optima[j];
    return x;
}

namespace {

template <class OnRound>
double play_mts(const AtomicPrior& prior, const ProblemInstance& instance, const std::vector<Vector>& optima,
                std::size_t atom, std::mt19937_64& gen, OnRound&& on_round) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Posterior posterior = Posterior::from_prior(prior);
    const auto& sequence = prior.sequences[atom];
    const Vector& target = optima[atom];
    double cumulative = 0.0;
    for (int t = 1; t <= prior.horizon(); ++t) {
        const Vector x = mts_iterate(posterior, optima);
        const Vector& loss = sequence[static_cast<std::size_t>(t - 1)];
        std::size_t action = 0;
        if (instance.finite_actions()) {
            action = sample_index(x, unit(gen));
            cumulative += loss[static_cast<Eigen::Index>(action)] - target.dot(loss);
        } else {
            cumulative += (x - target).dot(loss);
        }
        const Observation observed = observe(instance, action, x, loss);
        posterior = posterior_update(posterior, prior, instance, action, observed, t);
        on_round(t, cumulative, posterior);
    }
    return cumulative;
}

}  // namespace

double mts_sample_regret(const AtomicPrior& prior, const ProblemInstance& instance,
                         const std::vector<Vector>& atom_optima, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Map<const Vector> weights(prior.weights.data(), static_cast<Eigen::Index>(prior.size()));
    const std::size_t atom = sample_index(weights, unit(gen));
    return play_mts(prior, instance, atom_optima, atom, gen, [](int, double, const Posterior&) {});
}

MtsSample mts_run(const AtomicPrior& prior, const ProblemInstance& instance, std::uint64_t seed, std::uint64_t run_id,
                  const std::vector<int>& checkpoints) {
    check_pairing(prior, instance);
    const auto optima = atom_optima(prior, instance);
    const auto schedule = checkpoints.empty() ? geometric_checkpoints(prior.horizon()) : checkpoints;
    auto atom_stream = make_stream(seed, run_id, StreamPurpose::Losses);
    auto action_stream = make_stream(seed, run_id, StreamPurpose::Actions);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Map<const Vector> weights(prior.weights.data(), static_cast<Eigen::Index>(prior.size()));

    MtsSample sample{sample_index(weights, unit(atom_stream)), 0.0, {}};
    sample.trace.run_id = run_id;
    std::size_t next = 0;
    Posterior last = Posterior::from_prior(prior);
    sample.regret = play_mts(prior, instance, optima, sample.atom, action_stream,
                             [&](int t, double cumulative, const Posterior& posterior) {
                                 while (next < schedule.size() && schedule[next] == t) {
                                     sample.trace.checkpoints.push_back({t, cumulative});
                                     ++next;
                                 }
                                 last = posterior;
                             });
    sample.trace.final_iterate = mts_iterate(last, optima);
    return sample;
}

MtsEnumeration enumerate_mts(const AtomicPrior& prior, const ProblemInstance& instance) {
    check_pairing(prior, instance);
    require(instance.finite_actions(), "enumerate_mts: needs a finite action set");
    const int k = instance.dim;
    const int n = prior.horizon();
    if (k > kEnumerationMaxActions || n > kEnumerationMaxHorizon || prior.size() > kEnumerationMaxAtoms) {
        std::ostringstream os;
        os << "enumerate_mts: instance needs up to k^n * atoms = " << k << "^" << n << " * " << prior.size() << " = "
           << std::pow(static_cast<double>(k), n) * static_cast<double>(prior.size())
           << " leaves; the enumeration budget is k <= " << kEnumerationMaxActions << ", n <= " << kEnumerationMaxHorizon
           << ", atoms <= " << kEnumerationMaxAtoms;
        throw DomainError(os.str());
    }

    MtsEnumeration out;
    out.horizon = n;
    out.k = k;
    out.atom_optima = atom_optima(prior, instance);

    Posterior root = Posterior::from_prior(prior);
    out.nodes.push_back({1, 1.0, root.weights, mts_iterate(root, out.atom_optima), 0.0, {}});
    for (std::size_t index = 0; index < out.nodes.size(); ++index) {
        if (out.nodes[index].t > n) continue;
        const int t = out.nodes[index].t;
        const Vector pi = out.nodes[index].posterior;
        const Vector x = out.nodes[index].x;
        const double reach = out.nodes[index].reach;

        double expected = 0.0;
        for (std::size_t j = 0; j < prior.size(); ++j) {
            const double w = pi[static_cast<Eigen::Index>(j)];
            if (w == 0.0) continue;
            const Vector& loss = prior.sequences[j][static_cast<std::size_t>(t - 1)];
            expected += w * (x - out.atom_optima[j]).dot(loss);
        }
        out.nodes[index].expected_regret = expected;
        out.bayes_regret += reach * expected;

        std::vector<MtsBranch> branches;
        for (int a = 0; a < k; ++a) {
            if (x[a] <= 0.0) continue;
            // Partition the consistent atoms by the observation they produce.
            std::vector<Observation> outcomes;
            std::vector<Vector> masses;
            for (std::size_t j = 0; j < prior.size(); ++j) {
                const double w = pi[static_cast<Eigen::Index>(j)];
                if (w == 0.0) continue;
                const Observation o = signal(instance, static_cast<std::size_t>(a), prior.sequences[j][static_cast<std::size_t>(t - 1)]);
                std::size_t slot = 0;
                while (slot < outcomes.size() && !same_observation(outcomes[slot], o)) ++slot;
                if (slot == outcomes.size()) {
                    outcomes.push_back(o);
                    masses.push_back(Vector::Zero(static_cast<Eigen::Index>(prior.size())));
                }
                masses[slot][static_cast<Eigen::Index>(j)] = w;
            }
            for (auto& mass : masses) {
                const double total = mass.sum();
                const double probability = x[a] * total;
                Vector child_posterior = mass / total;
                Vector child_x = mts_iterate(Posterior{child_posterior}, out.atom_optima);
                branches.push_back({static_cast<std::size_t>(a), probability, out.nodes.size()});
                out.nodes.push_back({t + 1, reach * probability, std::move(child_posterior), std::move(child_x), 0.0, {}});
            }
        }
        out.nodes[index].branches = std::move(branches);
    }
    return out;
}

double exhaustive_bayes_regret(const AtomicPrior& prior, const ProblemInstance& instance) {
    return enumerate_mts(prior, instance).bayes_regret;
}

}  // namespace osmd
