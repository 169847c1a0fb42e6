#include "momentforge/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace momentforge::reduce {

namespace {

using ratlin::Integer;
using ratlin::IntVector;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

IntVector basis_vector(std::size_t n, std::size_t j) {
    IntVector e(n, Integer(0));
    e[j] = 1;
    return e;
}

// Original combination of a residual combination: zero on the reduced generators.
IntVector lift_combination(const ReducedSpace& red, const IntVector& w) {
    IntVector out(red.problem.moment.action.size(), Integer(0));
    for (std::size_t j = 0; j < w.size(); ++j) out[red.kept_generators[j]] = w[j];
    return out;
}

}  // namespace

void ReductionProblem::validate() const {
    if (levels.size() != generators.size()) throw std::invalid_argument("reduction: one level per reduced generator");
    std::set<std::size_t> seen_gen, seen_sphere;
    for (std::size_t k = 0; k < generators.size(); ++k) {
        const std::size_t j = generators[k];
        if (j >= moment.action.size()) throw std::invalid_argument("reduction: generator index out of range");
        if (!seen_gen.insert(j).second) throw std::invalid_argument("reduction: generator listed twice");
        const auto& g = moment.action.generator(j);
        if (std::any_of(g.translation.begin(), g.translation.end(), [](auto v) { return v != 0; }))
            throw std::invalid_argument("reduction: generator " + std::to_string(j + 1) + " translates the torus");
        if (std::count_if(g.speeds.begin(), g.speeds.end(), [](auto v) { return v != 0; }) != 1)
            throw std::invalid_argument("reduction: generator " + std::to_string(j + 1) +
                                        " must rotate exactly one sphere");
        if (!seen_sphere.insert(sphere_of(k)).second)
            throw std::invalid_argument("reduction: two reduced generators rotate the same sphere");
    }
}

std::size_t ReductionProblem::sphere_of(std::size_t k) const {
    const auto& s = moment.action.generator(generators.at(k)).speeds;
    return static_cast<std::size_t>(std::find_if(s.begin(), s.end(), [](auto v) { return v != 0; }) - s.begin());
}

bool RegularValueVerdict::regular() const {
    return std::all_of(status.begin(), status.end(), [](Status s) { return s == Status::Regular; });
}

RegularValueVerdict regular_value_check(const ReductionProblem& p) {
    p.validate();
    const ProductManifold& m = p.moment.omega_prime;
    const ActionSpec& a = p.moment.action;
    const int eps = geom::sign_factor(a.sign());
    RegularValueVerdict v;
    for (std::size_t k = 0; k < p.generators.size(); ++k) {
        const std::size_t f = p.sphere_of(k);
        const double slope = eps * m.sphere_coefficient(f) * static_cast<double>(a.generator(p.generators[k]).speeds[f]);
        const double h = p.levels[k] / slope;
        v.heights.push_back(h);
        if (std::abs(h) < 1.0) {
            v.status.push_back(RegularValueVerdict::Status::Regular);
        } else if (std::abs(std::abs(h) - 1.0) <= 1e-12) {
            v.status.push_back(RegularValueVerdict::Status::Critical);
            Point pole = p.moment.basepoint;
            pole[m.height_index(f)] = h > 0 ? 1.0 : -1.0;
            const auto comp = moment::hamiltonian_component(m, a, basis_vector(a.size(), p.generators[k]));
            const double step = 1e-6;
            double g2 = 0.0;
            for (std::size_t i = 0; i < m.dimension(); ++i) {
                std::vector<double> plane(m.dimension(), 0.0);
                plane[i] = step;
                const double up = comp(m, geom::darboux_chart(m, pole, plane));
                plane[i] = -step;
                const double down = comp(m, geom::darboux_chart(m, pole, plane));
                g2 += std::pow((up - down) / (2 * step), 2);
            }
            v.witnesses.push_back(pole);
            v.witness_gradient.push_back(std::sqrt(g2));
        } else {
            v.status.push_back(RegularValueVerdict::Status::OutsideImage);
        }
    }
    return v;
}

Point ReducedSpace::lift(const Point& y, const std::vector<double>& theta) const {
    const ProductManifold& m = problem.moment.omega_prime;
    Point x(m.dimension(), 0.0);
    for (std::size_t k = 0; k < m.torus_dim(); ++k) x[k] = y[k];
    for (std::size_t f = 0; f < kept_spheres.size(); ++f) {
        x[m.theta_index(kept_spheres[f])] = y[manifold.theta_index(f)];
        x[m.height_index(kept_spheres[f])] = y[manifold.height_index(f)];
    }
    for (std::size_t k = 0; k < problem.generators.size(); ++k) {
        const std::size_t f = problem.sphere_of(k);
        x[m.theta_index(f)] = theta.at(k);
        x[m.height_index(f)] = heights[k];
    }
    return x;
}

ReducedSpace reduce_at(const ReductionProblem& p) {
    const RegularValueVerdict verdict = regular_value_check(p);
    if (!verdict.regular()) throw ReductionError(ReductionError::Kind::NotRegular, "level is not a regular value");
    const ProductManifold& m = p.moment.omega_prime;
    const ActionSpec& a = p.moment.action;
    std::set<std::size_t> deleted;
    for (std::size_t k = 0; k < p.generators.size(); ++k) {
        const std::size_t f = p.sphere_of(k);
        const auto s = a.generator(p.generators[k]).speeds[f];
        // Speed s fixes the whole circle Z/s pointwise on the level set.
        if (s != 1 && s != -1)
            throw ReductionError(ReductionError::Kind::NotFree,
                                 "generator " + std::to_string(p.generators[k] + 1) + " has speed " + std::to_string(s));
        deleted.insert(f);
    }
    std::vector<std::size_t> kept_spheres;
    std::vector<geom::SphereFactor> spheres;
    for (std::size_t f = 0; f < m.sphere_count(); ++f)
        if (!deleted.count(f)) {
            kept_spheres.push_back(f);
            spheres.push_back(m.spheres()[f]);
        }
    if (!m.torus() && spheres.empty()) throw std::invalid_argument("reduction: the reduced space is a point");
    ProductManifold reduced(m.torus(), spheres);

    std::vector<geom::Generator> gens;
    std::vector<std::size_t> kept_generators;
    const std::set<std::size_t> reduced_gens(p.generators.begin(), p.generators.end());
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (reduced_gens.count(j)) continue;
        geom::Generator g{a.generator(j).translation, {}};
        for (auto f : kept_spheres) g.speeds.push_back(a.generator(j).speeds[f]);
        const bool trivial = std::all_of(g.translation.begin(), g.translation.end(), [](auto v) { return v == 0; }) &&
                             std::all_of(g.speeds.begin(), g.speeds.end(), [](auto v) { return v == 0; });
        if (trivial) continue;
        gens.push_back(std::move(g));
        kept_generators.push_back(j);
    }
    ActionSpec action(reduced, std::move(gens), a.sign());
    return ReducedSpace{p, std::move(reduced), std::move(action), std::move(kept_generators), std::move(kept_spheres),
                        verdict.heights};
}

double collapsed_orbit_variation(const ReducedSpace& red, const std::function<double(const Point&)>& f,
                                 std::size_t n, std::uint64_t seed) {
    const std::size_t k = red.problem.generators.size();
    if (k == 0) return 0.0;
    std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
    double worst = 0.0;
    for (const auto& y : geom::sample_points(red.manifold, n, seed)) {
        const double base = f(red.lift(y, std::vector<double>(k, 0.0)));
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<double> theta(k);
            for (auto& t : theta) t = unit(rng);
            worst = std::max(worst, std::abs(f(red.lift(y, theta)) - base));
        }
    }
    return worst;
}

InducedMoment induced_moment(const ReducedSpace& red, std::size_t n, std::uint64_t seed) {
    const GeneralizedMoment& orig = red.problem.moment;
    const ProductManifold& m = orig.omega_prime;
    InducedMoment out{moment::generalized_moment(red.manifold, red.action,
                                                 hamclass::classify_action(hamclass::period_matrix(red.manifold, red.action))),
                      0.0, 0.0};

    for (const auto& h : orig.mu1)
        out.orbit_variation = std::max(out.orbit_variation, collapsed_orbit_variation(red, [&](const Point& x) { return h(m, x); }, n, seed));
    for (const auto& c : orig.mu2)
        out.orbit_variation = std::max(out.orbit_variation, collapsed_orbit_variation(red, [&](const Point& x) { return c.raw(m, x); }, n, seed));
    if (out.orbit_variation > 1e-9)
        throw ReductionError(ReductionError::Kind::NotInvariantOnOrbits,
                             "moment varies by " + std::to_string(out.orbit_variation) + " along a collapsed orbit");

    // Each induced component is the restriction of the original component with
    // the same combination, up to the shift of basepoint.
    const auto samples = geom::sample_points(red.manifold, n, seed);
    const std::vector<double> zero(red.problem.generators.size(), 0.0);
    for (const auto& h : out.moment.mu1) {
        const auto o = moment::hamiltonian_component(m, orig.action, lift_combination(red, h.combination));
        double offset = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double d = h(red.manifold, samples[s]) - o(m, red.lift(samples[s], zero));
            if (s == 0) offset = d;
            out.restriction_error = std::max(out.restriction_error, std::abs(d - offset));
        }
    }
    for (const auto& c : out.moment.mu2) {
        const auto o = moment::mcduff_component(m, orig.action, lift_combination(red, c.combination), orig.basepoint);
        double offset = 0.0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double d = c.raw(red.manifold, samples[s]) - o.raw(m, red.lift(samples[s], zero));
            if (s == 0) offset = d;
            out.restriction_error = std::max(out.restriction_error, geom::circle_distance(d, offset));
        }
    }
    return out;
}

std::string HeredityVerdict::summary() const {
    if (vacuous) return "vacuous (no non-Hamiltonian residual circle)";
    std::string s = non_hamiltonian ? "residual circle non-Hamiltonian" : "residual circle became Hamiltonian";
    std::size_t worst = bins;
    for (auto b : bins_hit) worst = std::min(worst, b);
    s += "; induced circle moment hits " + std::to_string(worst) + "/" + std::to_string(bins) + " bins";
    return s;
}

HeredityVerdict heredity_check(const ReducedSpace& red, std::size_t bins, std::size_t n, std::uint64_t seed) {
    HeredityVerdict v;
    v.bins = bins;
    if (red.problem.moment.r() == 0) {
        v.vacuous = true;
        return v;
    }
    const auto periods = hamclass::period_matrix(red.manifold, red.action);
    for (std::size_t j = 0; j < periods.rows(); ++j) {
        double worst = 0.0;
        for (std::size_t k = 0; k < periods.cols(); ++k) worst = std::max(worst, std::abs(periods.values(j, k)));
        v.residual_period.push_back(worst);
    }
    const auto cls = hamclass::classify_action(periods);
    v.non_hamiltonian = cls.r == red.problem.moment.r();
    const auto induced = moment::generalized_moment(red.manifold, red.action, cls);
    const auto samples = geom::sample_points(red.manifold, n, seed);
    v.surjective = !induced.mu2.empty();
    for (const auto& c : induced.mu2) {
        std::vector<bool> hit(bins, false);
        for (const auto& y : samples)
            hit[std::min(bins - 1, static_cast<std::size_t>(c(red.manifold, y).representative * static_cast<double>(bins)))] = true;
        v.bins_hit.push_back(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), true)));
        if (v.bins_hit.back() != bins) v.surjective = false;
    }
    return v;
}

}  // namespace momentforge::reduce
