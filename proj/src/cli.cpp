#include "momentforge/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace momentforge::cli {

namespace {

using geom::Coefficient;

// ---------------------------------------------------------------- parsing

struct Line {
    std::string key;
    std::string value;
    SourcePos key_pos;
    SourcePos value_pos;
};

struct Block {
    SourcePos header;
    std::vector<Line> lines;
};

[[noreturn]] void fail(const std::string& origin, SourcePos pos, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg);
}

std::pair<std::size_t, std::size_t> trimmed_range(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return {b, e};
}

std::string trim(std::string_view s) {
    auto [b, e] = trimmed_range(s);
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    for (std::string t; is >> t;) out.push_back(t);
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    return out;
}

template <class T>
std::optional<T> parse_number(std::string_view t) {
    T v{};
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
    return v;
}

class Parser {
public:
    Parser(std::string_view text, std::string origin) : origin_(std::move(origin)) { scan(text); }

    Scenario build() {
        Scenario s;
        const std::string stem = std::filesystem::path(origin_).stem().string();
        s.name = stem.empty() ? origin_ : stem;
        for (const auto& [name, block] : blocks_)
            if (!known_keys().count(name)) fail(origin_, block.header, "unknown section [" + name + "]");
        for (const auto& [name, block] : blocks_) check_keys(name, block);

        if (!blocks_.count("manifold")) fail(origin_, {1, 1}, "missing [manifold] section");
        s.manifold = manifold(blocks_.at("manifold"));
        if (!blocks_.count("action")) fail(origin_, {1, 1}, "missing [action] section");
        s.action = action(blocks_.at("action"), *s.manifold);
        if (blocks_.count("pipeline")) pipeline(blocks_.at("pipeline"), s);
        if (blocks_.count("reduce"))
            for (const auto& l : blocks_.at("reduce").lines) s.reduce.push_back(reduce_stage(l));
        if (blocks_.count("expect"))
            for (const auto& l : blocks_.at("expect").lines) s.expect[l.key] = expectation(l);
        return s;
    }

private:
    std::string origin_;
    std::map<std::string, Block> blocks_;

    static const std::map<std::string, std::set<std::string>>& known_keys() {
        static const std::map<std::string, std::set<std::string>> keys{
            {"manifold", {"torus", "omega", "spheres"}},
            {"action", {"sign", "generator"}},
            {"pipeline",
             {"seed", "max_denominator", "samples", "coverage_samples", "coverage_grid", "extremum_grid",
              "heredity_samples", "coverage_min", "checks"}},
            {"reduce", {"stage"}},
            {"expect", {"c", "r", "k", "z", "omega_prime", "mu2_covectors", "fiber_d", "heredity", "betti"}},
        };
        return keys;
    }

    void scan(std::string_view text) {
        Block* current = nullptr;
        std::size_t no = 0;
        for (const auto& raw : split(text, '\n')) {
            ++no;
            std::string_view line(raw);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            auto [b, e] = trimmed_range(line);
            if (b == e) continue;
            const SourcePos at{no, b + 1};
            if (line[b] == '[') {
                if (line[e - 1] != ']') fail(origin_, at, "unterminated section header");
                const std::string name = trim(line.substr(b + 1, e - b - 2));
                if (blocks_.count(name)) fail(origin_, at, "duplicate section [" + name + "]");
                current = &blocks_[name];
                current->header = at;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) fail(origin_, at, "expected 'key = value'");
            if (!current) fail(origin_, at, "key outside of any section");
            Line l;
            l.key = trim(line.substr(0, eq));
            l.key_pos = at;
            if (l.key.empty()) fail(origin_, at, "empty key");
            const std::string_view rest = line.substr(eq + 1);
            auto [vb, ve] = trimmed_range(rest);
            l.value = std::string(rest.substr(vb, ve - vb));
            l.value_pos = {no, eq + 2 + vb};
            current->lines.push_back(std::move(l));
        }
    }

    void check_keys(const std::string& section, const Block& block) const {
        static const std::set<std::string> repeatable{"generator", "stage"};
        const auto& allowed = known_keys().at(section);
        std::set<std::string> seen;
        for (const auto& l : block.lines) {
            if (!allowed.count(l.key)) fail(origin_, l.key_pos, "unknown key '" + l.key + "' in [" + section + "]");
            if (!repeatable.count(l.key) && !seen.insert(l.key).second)
                fail(origin_, l.key_pos, "duplicate key '" + l.key + "'");
        }
    }

    static const Line* find(const Block& b, const std::string& key) {
        for (const auto& l : b.lines)
            if (l.key == key) return &l;
        return nullptr;
    }

    Coefficient coefficient(const std::string& t, SourcePos pos) const {
        try {
            return Coefficient::parse(t);
        } catch (const std::exception& e) {
            fail(origin_, pos, e.what());
        }
    }

    std::size_t count(const Line& l, std::size_t min) const {
        auto v = parse_number<std::size_t>(l.value);
        if (!v || *v < min) fail(origin_, l.value_pos, "'" + l.key + "' must be an integer >= " + std::to_string(min));
        return *v;
    }

    std::int64_t integer(const std::string& t, SourcePos pos) const {
        auto v = parse_number<std::int64_t>(t);
        if (!v) fail(origin_, pos, "expected an integer, got '" + t + "'");
        return *v;
    }

    ProductManifold manifold(const Block& b) const {
        std::optional<geom::FlatTorusFactor> torus;
        std::size_t dim = 0;
        const Line* tl = find(b, "torus");
        const Line* ol = find(b, "omega");
        if (tl) {
            dim = count(*tl, 0);
            if (dim % 2 != 0) fail(origin_, tl->value_pos, "torus dimension must be even");
        }
        if (dim > 0) {
            if (!ol) fail(origin_, tl->key_pos, "torus factor needs an 'omega' line");
            std::vector<Coefficient> w(dim * dim);
            const auto head = tokens(ol->value);
            if (!head.empty() && head[0] == "standard") {
                if (head.size() > 2) fail(origin_, ol->value_pos, "usage: omega = standard [coefficient]");
                const Coefficient c = head.size() == 2 ? coefficient(head[1], ol->value_pos) : Coefficient::exact(1);
                for (std::size_t p = 0; p < dim / 2; ++p) {
                    w[2 * p * dim + 2 * p + 1] = c;
                    w[(2 * p + 1) * dim + 2 * p] = -c;
                }
            } else {
                const auto rows = split(ol->value, ';');
                if (rows.size() != dim) fail(origin_, ol->value_pos, "omega needs " + std::to_string(dim) + " rows");
                for (std::size_t i = 0; i < dim; ++i) {
                    const auto row = tokens(rows[i]);
                    if (row.size() != dim)
                        fail(origin_, ol->value_pos, "omega row " + std::to_string(i + 1) + " needs " + std::to_string(dim) + " entries");
                    for (std::size_t j = 0; j < dim; ++j) w[i * dim + j] = coefficient(row[j], ol->value_pos);
                }
            }
            try {
                torus.emplace(dim, std::move(w));
            } catch (const std::exception& e) {
                fail(origin_, ol->value_pos, e.what());
            }
        } else if (ol) {
            fail(origin_, ol->key_pos, "'omega' given without a torus factor");
        }
        std::vector<geom::SphereFactor> spheres;
        if (const Line* sl = find(b, "spheres")) {
            for (const auto& t : tokens(sl->value)) {
                try {
                    spheres.emplace_back(coefficient(t, sl->value_pos));
                } catch (const geom::GeometryError& e) {
                    fail(origin_, sl->value_pos, e.what());
                }
            }
        }
        try {
            return ProductManifold(std::move(torus), std::move(spheres));
        } catch (const std::exception& e) {
            fail(origin_, b.header, e.what());
        }
    }

    ActionSpec action(const Block& b, const ProductManifold& m) const {
        SignConvention sign = SignConvention::Plus;
        if (const Line* sl = find(b, "sign")) {
            try {
                sign = geom::parse_sign_convention(sl->value);
            } catch (const std::exception& e) {
                fail(origin_, sl->value_pos, e.what());
            }
        }
        std::vector<geom::Generator> gens;
        for (const auto& l : b.lines) {
            if (l.key != "generator") continue;
            std::vector<std::string> left, right;
            if (auto bar = l.value.find('|'); bar != std::string::npos) {
                left = tokens(l.value.substr(0, bar));
                right = tokens(l.value.substr(bar + 1));
            } else {
                auto all = tokens(l.value);
                if (all.size() != m.torus_dim() + m.sphere_count())
                    fail(origin_, l.value_pos,
                         "generator needs " + std::to_string(m.torus_dim() + m.sphere_count()) + " integers");
                left.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m.torus_dim()));
                right.assign(all.begin() + static_cast<std::ptrdiff_t>(m.torus_dim()), all.end());
            }
            if (left.size() != m.torus_dim())
                fail(origin_, l.value_pos, "generator translation needs " + std::to_string(m.torus_dim()) + " entries");
            if (right.size() != m.sphere_count())
                fail(origin_, l.value_pos, "generator needs " + std::to_string(m.sphere_count()) + " sphere speeds");
            geom::Generator g;
            for (const auto& t : left) g.translation.push_back(integer(t, l.value_pos));
            for (const auto& t : right) g.speeds.push_back(integer(t, l.value_pos));
            try {
                ActionSpec(m, {g});
            } catch (const std::exception&) {
                fail(origin_, l.value_pos, "generator is trivial");
            }
            gens.push_back(std::move(g));
        }
        if (gens.empty()) fail(origin_, b.header, "action needs at least one generator");
        return ActionSpec(m, std::move(gens), sign);
    }

    void pipeline(const Block& b, Scenario& s) const {
        for (const auto& l : b.lines) {
            if (l.key == "seed") {
                auto v = parse_number<std::uint64_t>(l.value);
                if (!v) fail(origin_, l.value_pos, "seed must be a non-negative integer");
                s.seed = *v;
            } else if (l.key == "max_denominator") {
                s.max_denominator = static_cast<long>(count(l, 1));
            } else if (l.key == "samples") {
                s.samples = count(l, 1);
            } else if (l.key == "coverage_samples") {
                s.coverage_samples = count(l, 1);
            } else if (l.key == "coverage_grid") {
                s.coverage_grid = count(l, 1);
            } else if (l.key == "extremum_grid") {
                s.extremum_grid = count(l, 3);
            } else if (l.key == "heredity_samples") {
                s.heredity_samples = count(l, 1);
            } else if (l.key == "coverage_min") {
                auto v = parse_number<double>(l.value);
                if (!v || *v < 0.0 || *v > 1.0) fail(origin_, l.value_pos, "coverage_min must lie in [0, 1]");
                s.coverage_min = *v;
            } else if (l.key == "checks") {
                const auto names = tokens(l.value);
                if (names.size() == 1 && names[0] == "all") continue;
                if (names.empty()) fail(origin_, l.value_pos, "empty check list");
                s.checks.clear();
                for (const auto& n : names) {
                    auto st = parse_stage(n);
                    if (!st) fail(origin_, l.value_pos, "unknown check '" + n + "'");
                    s.checks.push_back(*st);
                }
            }
        }
    }

    ReduceStage reduce_stage(const Line& l) const {
        const auto parts = split(l.value, ':');
        if (parts.size() != 2) fail(origin_, l.value_pos, "usage: stage = generators : levels");
        ReduceStage st;
        st.pos = l.key_pos;
        for (const auto& t : tokens(parts[0])) {
            const auto j = integer(t, l.value_pos);
            if (j < 1) fail(origin_, l.value_pos, "generator indices start at 1");
            st.generators.push_back(static_cast<std::size_t>(j - 1));
        }
        for (const auto& t : tokens(parts[1])) {
            auto v = parse_number<double>(t);
            if (!v || !std::isfinite(*v)) fail(origin_, l.value_pos, "bad level '" + t + "'");
            st.levels.push_back(*v);
        }
        if (st.generators.size() != st.levels.size()) fail(origin_, l.value_pos, "one level per generator");
        return st;
    }

    IntMatrix matrix(const Line& l) const {
        if (l.value == "empty") return IntMatrix(0, 0);
        const auto rows = split(l.value, ';');
        std::vector<Integer> data;
        std::size_t cols = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto row = tokens(rows[i]);
            if (row.empty()) fail(origin_, l.value_pos, "empty matrix row");
            if (i == 0) cols = row.size();
            if (row.size() != cols) fail(origin_, l.value_pos, "matrix rows differ in length");
            for (const auto& t : row) data.emplace_back(static_cast<long>(integer(t, l.value_pos)));
        }
        return IntMatrix(rows.size(), cols, std::move(data));
    }

    Expectation expectation(const Line& l) const {
        Expectation e;
        e.raw = l.value;
        e.pos = l.key_pos;
        if (l.key == "c" || l.key == "r" || l.key == "k") {
            e.integer = static_cast<long>(integer(l.value, l.value_pos));
        } else if (l.key == "heredity" || l.key == "betti") {
            if (l.value != "pass" && l.value != "fail") fail(origin_, l.value_pos, "expected 'pass' or 'fail'");
            e.verdict = l.value == "pass";
        } else {
            e.matrix = matrix(l);
        }
        return e;
    }
};

// ---------------------------------------------------------------- formatting

std::string fmt(const Integer& x) { return x.get_str(); }
std::string fmt(double x) { return format_double(x); }
std::string fmt(const ratlin::Rational& x) { return x.str(); }

template <class T>
std::string fmt_vector(const std::vector<T>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

template <class T>
std::string fmt_matrix(const ratlin::Matrix<T>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + fmt(m(i, j));
        s += "]";
    }
    return s + "]";
}

std::string verdict(bool b) { return b ? "pass" : "fail"; }

// ---------------------------------------------------------------- pipeline

class Run {
public:
    Run(const Scenario& s, const RunOptions& o, PipelineState& st) : s_(s), st_(st) {
        rep_.scenario = s.name;
        rep_.seed = o.seed.value_or(s.seed.value_or(0));
        rep_.sign = o.sign.value_or(s.action->sign());
        maxden_ = o.max_denominator.value_or(s.max_denominator);
        const auto& wanted = o.stages.empty() ? s.checks : o.stages;
        for (auto w : wanted) {
            stages_.insert(w);
            if (w != Stage::Classify) stages_.insert(Stage::Classify);
            if (w != Stage::Classify && w != Stage::Integralize) {
                stages_.insert(Stage::Integralize);
                stages_.insert(Stage::Moment);
            }
        }
    }

    Report execute() {
        const ActionSpec a = s_.action->with_sign(rep_.sign);
        const ProductManifold& m = *s_.manifold;
        bool blocked = false;
        for (Stage stage : kAllStages) {
            if (!stages_.count(stage)) continue;
            Section& sec = section(std::string(to_string(stage)));
            if (blocked) {
                put(sec, "status", "skipped (prerequisite failed)");
                continue;
            }
            try {
                switch (stage) {
                    case Stage::Classify: classify(sec, m, a); break;
                    case Stage::Integralize: integralize(sec, m, a); break;
                    case Stage::Moment: moment_stage(sec, a); break;
                    case Stage::Equivariance: equivariance(sec); break;
                    case Stage::Convexity: convexity(sec); break;
                    case Stage::Reduce: reduction(sec); break;
                    case Stage::Betti: betti(sec); break;
                }
            } catch (const std::exception& e) {
                check(std::string(to_string(stage)) + ".error", false, e.what());
                if (stage == Stage::Classify || stage == Stage::Integralize || stage == Stage::Moment) blocked = true;
            }
        }
        return std::move(rep_);
    }

private:
    const Scenario& s_;
    PipelineState& st_;
    Report rep_;
    Integer maxden_;
    std::set<Stage> stages_;

    Section& section(const std::string& name) {
        rep_.sections.push_back({name, {}});
        return rep_.sections.back();
    }
    static void put(Section& s, const std::string& k, const std::string& v) { s.entries.emplace_back(k, v); }
    void check(const std::string& name, bool pass, const std::string& detail) { rep_.checks.push_back({name, pass, detail}); }

    template <class T>
    void record(const std::string& name, const ratlin::Matrix<T>& m) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) rep_.matrices.push_back({name, i, j, fmt(m(i, j))});
    }

    const Expectation* expected(const std::string& key) const {
        auto it = s_.expect.find(key);
        return it == s_.expect.end() ? nullptr : &it->second;
    }

    void expect_matrix(const std::string& key, const IntMatrix& actual) {
        if (const auto* e = expected(key))
            check("expect." + key, *e->matrix == actual, "expected " + fmt_matrix(*e->matrix) + ", got " + fmt_matrix(actual));
    }
    void expect_integer(const std::string& key, const Integer& actual) {
        if (const auto* e = expected(key))
            check("expect." + key, *e->integer == actual, "expected " + fmt(*e->integer) + ", got " + fmt(actual));
    }
    void expect_verdict(const std::string& key, bool actual) {
        if (const auto* e = expected(key))
            check("expect." + key, *e->verdict == actual, "expected " + verdict(*e->verdict) + ", got " + verdict(actual));
    }

    const moment::GeneralizedMoment& mu() const { return *st_.moment; }

    void classify(Section& sec, const ProductManifold& m, const ActionSpec& a) {
        st_.periods = hamclass::period_matrix(m, a);
        st_.classification = hamclass::classify_action(*st_.periods);
        const auto& p = *st_.periods;
        const auto& cls = *st_.classification;
        put(sec, "manifold", m.describe());
        put(sec, "generators", std::to_string(a.size()));
        put(sec, "effective", a.effective() ? "yes" : "no");
        put(sec, "period_matrix", p.exact ? fmt_matrix(p.exact_values) : fmt_matrix(p.values));
        put(sec, "c", std::to_string(cls.c));
        put(sec, "r", std::to_string(cls.r));
        put(sec, "hamiltonian", fmt_matrix(cls.hamiltonian));
        put(sec, "complement", fmt_matrix(cls.complement));
        if (p.exact) record("period_matrix", p.exact_values);
        else record("period_matrix", p.values);
        record("hamiltonian", cls.hamiltonian);
        record("complement", cls.complement);

        std::vector<Integer> stacked;
        for (std::size_t i = 0; i < cls.c; ++i)
            for (std::size_t j = 0; j < a.size(); ++j) stacked.push_back(cls.hamiltonian(i, j));
        for (std::size_t i = 0; i < cls.r; ++i)
            for (std::size_t j = 0; j < a.size(); ++j) stacked.push_back(cls.complement(i, j));
        const Integer det = ratlin::determinant(IntMatrix(a.size(), a.size(), stacked));
        check("classify.unimodular_splitting", abs(det) == 1, "det [hamiltonian; complement] = " + fmt(det));
        const auto hp = hamclass::combination_periods(p, cls.hamiltonian);
        double worst = 0.0;
        for (double v : hp.values.data()) worst = std::max(worst, std::abs(v));
        check("classify.hamiltonian_periods_vanish", worst <= hamclass::kRealRankTolerance, "max |period| = " + fmt(worst));
        expect_integer("c", static_cast<long>(cls.c));
        expect_integer("r", static_cast<long>(cls.r));
    }

    void integralize(Section& sec, const ProductManifold& m, const ActionSpec& a) {
        st_.integralization = hamclass::integralize_form(m, a, maxden_);
        const auto& res = *st_.integralization;
        const auto& wp = res.omega_prime;
        put(sec, "max_denominator", fmt(maxden_));
        put(sec, "attempts", std::to_string(res.attempts));
        put(sec, "denominator_bound_used", fmt(res.max_denominator));
        put(sec, "form_coordinates", fmt_vector(res.a));
        put(sec, "rational_coordinates", fmt_vector(res.q));
        put(sec, "max_deviation", fmt(res.max_deviation));
        put(sec, "k", fmt(res.k));
        put(sec, "omega_prime", wp.describe());
        if (wp.torus()) {
            put(sec, "omega_prime_torus", fmt_matrix(wp.torus()->exact_omega()));
            record("omega_prime", wp.torus()->exact_omega());
        }
        bool integral = true;
        std::string bad;
        for (const auto& cyc : geom::homology_bases(wp).cycles) {
            const auto v = geom::integrate_twoform_over_cycle(wp, cyc);
            if (!v.is_exact() || !v.rational().is_integer()) {
                integral = false;
                bad = cyc.label() + " = " + v.str();
            }
        }
        check("integralize.h2_periods_integral", integral, integral ? "all H2 periods are integers" : bad);
        const auto again = hamclass::classify_action(hamclass::period_matrix(wp, a));
        check("integralize.classification_preserved", again == *st_.classification,
              "complement " + fmt_matrix(again.complement));
        expect_integer("k", res.k);
        if (wp.torus()) {
            IntMatrix om(wp.torus_dim(), wp.torus_dim());
            const auto ex = wp.torus()->exact_omega();
            for (std::size_t i = 0; i < om.rows(); ++i)
                for (std::size_t j = 0; j < om.cols(); ++j) om(i, j) = ex(i, j).numerator();
            expect_matrix("omega_prime", om);
        }
    }

    void moment_stage(Section& sec, const ActionSpec& a) {
        const ProductManifold& wp = st_.integralization->omega_prime;
        st_.moment = moment::generalized_moment(wp, a, *st_.classification);
        const auto& g = mu();
        put(sec, "c", std::to_string(g.c()));
        put(sec, "r", std::to_string(g.r()));
        put(sec, "basepoint", fmt_vector(g.basepoint));
        for (std::size_t i = 0; i < g.c(); ++i)
            put(sec, "mu1[" + std::to_string(i + 1) + "]",
                "combination " + fmt_vector(g.mu1[i].combination) + ", sphere slopes " + fmt_vector(g.mu1[i].sphere_slopes));
        IntMatrix cov(g.r(), wp.torus_dim());
        IntMatrix dvals(g.r() ? 1 : 0, g.r());
        for (std::size_t i = 0; i < g.r(); ++i) {
            const auto& c = g.mu2[i];
            const auto f = moment::fiber_connected_factorization(c.covector);
            put(sec, "mu2[" + std::to_string(i + 1) + "]",
                "combination " + fmt_vector(c.combination) + ", covector " + fmt_vector(c.covector) + ", sphere slopes " +
                    fmt_vector(c.sphere_slopes) + ", fiber components " + fmt(f.d));
            for (std::size_t k = 0; k < wp.torus_dim(); ++k) cov(i, k) = c.covector[k];
            dvals(0, i) = f.d;
        }
        record("mu2_covectors", cov);

        // Loop periods of every circle component.
        double worst = 0.0;
        const auto loops = geom::homology_bases(wp).loops;
        for (const auto& c : g.mu2)
            for (const auto& l : loops) {
                const double v = geom::integrate_oneform_over_loop(wp, c.field, l);
                worst = std::max(worst, std::abs(v - std::round(v)));
            }
        if (g.r() > 0)
            check("moment.loop_periods_integral", worst <= moment::kCircleTolerance, "max distance to Z = " + fmt(worst));

        if (g.r() > 0) {
            double wd = 0.0;
            bool ok = true;
            for (const auto& x : geom::sample_points(wp, 20, rep_.seed))
                for (const auto& c : g.mu2)
                    for (std::size_t k = 0; k < wp.torus_dim(); ++k) {
                        std::vector<std::int64_t> d(wp.torus_dim(), 0);
                        d[k] = 1;
                        const auto pr = moment::path_independence_check(wp, c, x, d);
                        ok = ok && pr.ok();
                        wd = std::max(wd, std::abs(pr.difference - std::round(pr.difference)));
                    }
            check("moment.path_independence", ok, "max non-integral detour difference = " + fmt(wd));
        }

        const auto fixed = geom::fixed_point_set(wp, a);
        put(sec, "fixed_points", fixed.describe());
        if (g.c() > 0 && !fixed.empty && fixed.finite()) {
            double resid = 0.0;
            bool ok = true;
            for (const auto& p : fixed.representatives(wp)) {
                const auto lm = moment::local_model_check(g, p, 0.1);
                resid = std::max(resid, lm.max_residual);
                ok = ok && lm.ok(1e-4);
            }
            check("moment.local_model", ok, "max quadratic-fit residual = " + fmt(resid) + " at radius 0.1");
        }

        Table t;
        t.header = {"sample", "seed"};
        for (std::size_t k = 0; k < wp.torus_dim(); ++k) t.header.push_back("x" + std::to_string(k + 1));
        for (std::size_t f = 0; f < wp.sphere_count(); ++f) {
            t.header.push_back("theta" + std::to_string(f + 1));
            t.header.push_back("h" + std::to_string(f + 1));
        }
        for (std::size_t i = 0; i < g.c(); ++i) t.header.push_back("mu1_" + std::to_string(i + 1));
        for (std::size_t i = 0; i < g.r(); ++i) t.header.push_back("mu2_" + std::to_string(i + 1));
        const auto pts = geom::sample_points(wp, s_.samples, rep_.seed);
        for (std::size_t n = 0; n < pts.size(); ++n) {
            std::vector<std::string> row{std::to_string(n), std::to_string(rep_.seed)};
            for (double v : pts[n]) row.push_back(fmt(v));
            const auto val = g(pts[n]);
            for (double v : val.mu1) row.push_back(fmt(v));
            for (double v : val.mu2) row.push_back(fmt(v));
            t.rows.push_back(std::move(row));
        }
        rep_.moment_samples = std::move(t);
        expect_matrix("mu2_covectors", cov);
        expect_matrix("fiber_d", dvals);
    }

    void equivariance(Section& sec) {
        const auto& g = mu();
        if (g.r() == 0) {
            put(sec, "status", "skipped (r = 0)");
            return;
        }
        st_.z = equiv::cocycle_matrix(g);
        const auto& z = *st_.z;
        put(sec, "Z", fmt_matrix(z));
        put(sec, "affine_action", equiv::describe_affine(z));
        record("Z", z);
        bool structure = true;
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j) structure = structure && z(i, j) == -z(j, i);
        check("equivariance.z_structure", structure, "zero diagonal and antisymmetric");
        const auto er = equiv::equivariance_check(g, z, s_.samples, rep_.seed);
        put(sec, "max_error", fmt(er.max_error));
        put(sec, "max_mu1_error", fmt(er.max_mu1_error));
        check("equivariance.affine", er.ok(1e-9) && er.max_mu1_error < 1e-9,
              "max error " + fmt(er.max_error) + " over " + std::to_string(er.samples) + " samples");
        const auto nv = equiv::natural_equivariance_test(g, 200, rep_.seed);
        put(sec, "fixed_points", nv.has_fixed_points ? "yes" : "no");
        put(sec, "isotropic", nv.isotropic ? "yes" : "no");
        put(sec, "z_zero", nv.z_zero ? "yes" : "no");
        put(sec, "mu2_invariant", nv.mu2_invariant ? "yes" : "no");
        check("equivariance.fixed_point_chain", nv.chain_holds(),
              nv.has_fixed_points ? "fixed points force isotropy, Z = 0 and invariance" : "no fixed points");
        const auto lf = equiv::local_freeness_check(g, z, s_.samples, rep_.seed);
        put(sec, "local_freeness", lf.summary());
        check("equivariance.local_freeness", !lf.hypothesis || lf.locally_free, lf.summary());
        expect_matrix("z", z);
    }

    void convexity(Section& sec) {
        const auto& g = mu();
        if (g.c() > 0) {
            const auto delta = convex::moment_polytope(g);
            std::string vs;
            for (const auto& v : delta.vertices()) vs += (vs.empty() ? "" : " ") + fmt_vector(v);
            put(sec, "delta_vertices", vs);
            const auto img = convex::moment_image_sample(g, s_.samples, rep_.seed);
            const auto hull = convex::convex_hull(img.mu1, g.c());
            double gap = 0.0;
            for (std::size_t i = 0; i < g.c(); ++i) {
                gap = std::max(gap, std::abs(hull.lower()[i] - delta.lower()[i]));
                gap = std::max(gap, std::abs(hull.upper()[i] - delta.upper()[i]));
            }
            put(sec, "sample_hull_gap", fmt(gap));
            check("convexity.hull", gap <= 0.05, "sampled hull within " + fmt(gap) + " of Delta");
        }
        if (g.c() + g.r() > 0) {
            const auto cov = convex::product_coverage_check(g, s_.coverage_grid, s_.coverage_samples, rep_.seed);
            put(sec, "coverage_grid", std::to_string(cov.grid));
            put(sec, "coverage_samples", std::to_string(cov.samples));
            put(sec, "coverage_cells", std::to_string(cov.counted) + " of " + std::to_string(cov.cells));
            put(sec, "coverage_fraction", fmt(cov.fraction));
            check("convexity.coverage", cov.fraction >= s_.coverage_min,
                  fmt(cov.fraction) + " of interior cells hit (minimum " + fmt(s_.coverage_min) + ")");
            Table t;
            t.header = {"cell", "hits"};
            for (std::size_t i = 0; i < cov.hits.size(); ++i) t.rows.push_back({std::to_string(i), std::to_string(cov.hits[i])});
            rep_.coverage = std::move(t);
        }
        if (g.r() == 0) {
            put(sec, "circle_checks", "skipped (r = 0)");
            return;
        }
        const auto ex = convex::no_local_extremum_check(g, s_.extremum_grid);
        check("convexity.no_local_extremum", ex.ok(), "grid " + std::to_string(s_.extremum_grid) + " per torus axis");
        std::vector<double> target(g.c(), 0.0);
        if (g.c() > 0) {
            const auto delta = convex::moment_polytope(g);
            for (const auto& v : delta.vertices())
                for (std::size_t i = 0; i < g.c(); ++i) target[i] += v[i] / static_cast<double>(delta.vertices().size());
        }
        const auto lift = convex::cycle_lift(g, target, std::vector<double>(g.r() - 1, 0.5));
        put(sec, "cycle_lift_direction", fmt_vector(lift.u));
        put(sec, "cycle_lift_winding", fmt(lift.k));
        put(sec, "cycle_lift_frozen_deviation", fmt(lift.max_frozen_deviation));
        check("convexity.cycle_lift", lift.ok(),
              "winding " + fmt(lift.measured_winding) + " (reported " + fmt(lift.k) + "), frozen deviation " +
                  fmt(lift.max_frozen_deviation));
    }

    void reduction(Section& sec) {
        if (s_.reduce.empty()) {
            put(sec, "status", "skipped (no stages)");
            return;
        }
        moment::GeneralizedMoment current = mu();
        bool all_ok = true;
        for (std::size_t i = 0; i < s_.reduce.size(); ++i) {
            const std::string tag = "stage" + std::to_string(i + 1);
            const auto& st = s_.reduce[i];
            const reduce::ReductionProblem p{current, st.generators, st.levels};
            const auto rv = reduce::regular_value_check(p);
            put(sec, tag + ".level_heights", fmt_vector(rv.heights));
            check("reduce." + tag + ".regular", rv.regular(), rv.regular() ? "interior level" : "level is critical or outside the image");
            const auto red = reduce::reduce_at(p);
            put(sec, tag + ".reduced_manifold", red.manifold.describe());
            const bool dims = red.manifold.dimension() + 2 * st.generators.size() == current.omega_prime.dimension();
            check("reduce." + tag + ".dimension", dims,
                  std::to_string(current.omega_prime.dimension()) + " -> " + std::to_string(red.manifold.dimension()));
            const auto before = hamclass::period_matrix(current.omega_prime, current.action);
            const auto after = hamclass::period_matrix(red.manifold, red.action);
            bool commute = true;
            for (std::size_t j = 0; j < after.rows(); ++j)
                commute = commute && after.exact_values.row(j) == before.exact_values.row(red.kept_generators[j]);
            check("reduce." + tag + ".periods_commute", commute, "residual period rows match the original rows");
            const auto ind = reduce::induced_moment(red, s_.samples, rep_.seed);
            put(sec, tag + ".induced_c", std::to_string(ind.moment.c()));
            put(sec, tag + ".induced_r", std::to_string(ind.moment.r()));
            check("reduce." + tag + ".induced_moment", ind.orbit_variation < 1e-9 && ind.restriction_error < 1e-9,
                  "orbit variation " + fmt(ind.orbit_variation) + ", restriction error " + fmt(ind.restriction_error));
            const auto h = reduce::heredity_check(red, 50, s_.heredity_samples, rep_.seed);
            put(sec, tag + ".heredity", h.summary());
            if (!h.residual_period.empty()) put(sec, tag + ".residual_periods", fmt_vector(h.residual_period));
            check("reduce." + tag + ".heredity", h.ok(), h.summary());
            all_ok = all_ok && h.ok();
            st_.reductions.push_back(red);
            current = ind.moment;
        }
        expect_verdict("heredity", all_ok);
    }

    void betti(Section& sec) {
        const auto& g = mu();
        if (g.r() == 0) {
            put(sec, "rank", "0");
            put(sec, "r", "0");
            put(sec, "b1", std::to_string(g.omega_prime.b1()));
            check("betti.bound", true, "r = 0 <= b1 = " + std::to_string(g.omega_prime.b1()));
            expect_verdict("betti", true);
            return;
        }
        const auto b = convex::betti_bound_check(g);
        put(sec, "rank", std::to_string(b.rank));
        put(sec, "r", std::to_string(b.r));
        put(sec, "b1", std::to_string(b.b1));
        check("betti.bound", b.ok(),
              "rank " + std::to_string(b.rank) + ", r = " + std::to_string(b.r) + " <= b1 = " + std::to_string(b.b1));
        expect_verdict("betti", b.ok());
    }
};

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << content;
    if (!os) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::Classify: return "classify";
        case Stage::Integralize: return "integralize";
        case Stage::Moment: return "moment";
        case Stage::Equivariance: return "equivariance";
        case Stage::Convexity: return "convexity";
        case Stage::Reduce: return "reduce";
        case Stage::Betti: return "betti";
    }
    return "";
}

std::optional<Stage> parse_stage(std::string_view name) {
    for (Stage s : kAllStages)
        if (to_string(s) == name) return s;
    return std::nullopt;
}

Scenario parse_scenario(std::string_view text, const std::string& origin) { return Parser(text, origin).build(); }

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(path.string() + ":0:0: cannot read scenario file");
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, const char* env, const Scenario& s) {
    if (flag) return *flag;
    if (env && *env) {
        auto v = parse_number<std::uint64_t>(env);
        if (!v) throw ConfigError(std::string("MOMENTFORGE_SEED:0:0: not a non-negative integer: '") + env + "'");
        return *v;
    }
    return s.seed.value_or(0);
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Report::text() const {
    std::ostringstream os;
    os << "momentforge report\n";
    os << "scenario: " << scenario << "\n";
    os << "seed: " << seed << "\n";
    os << "sign: " << geom::to_string(sign) << "\n";
    os << "tolerances: circle 1e-09, equivariance 1e-09, local model 1e-04 at radius 0.1, hull 0.05\n";
    for (const auto& s : sections) {
        os << "\n[" << s.name << "]\n";
        for (const auto& [k, v] : s.entries) os << k << ": " << v << "\n";
    }
    os << "\n[checks]\n";
    std::size_t passed_count = 0;
    for (const auto& c : checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        passed_count += c.pass;
    }
    os << "\nresult: " << (passed() ? "PASS" : "FAIL") << " (" << passed_count << "/" << checks.size() << " checks)\n";
    return os.str();
}

Report run_scenario(const Scenario& s, const RunOptions& opts, PipelineState* state) {
    PipelineState local;
    return Run(s, opts, state ? *state : local).execute();
}

std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

std::string matrices_csv(const Report& r) {
    Table t{{"name", "i", "j", "value"}, {}};
    for (const auto& e : r.matrices) t.rows.push_back({e.name, std::to_string(e.i), std::to_string(e.j), e.value});
    return to_csv(t);
}

void emit_report(const Report& r, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "report.txt", r.text());
    write_file(dir / "matrices.csv", matrices_csv(r));
    if (r.moment_samples) write_file(dir / "moment_samples.csv", to_csv(*r.moment_samples));
    if (r.coverage) write_file(dir / "coverage.csv", to_csv(*r.coverage));
}

std::string format_double(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

}  // namespace momentforge::cli
