#include "ccq/harness.hpp"

#include "ccq/agnostic.hpp"
#include "ccq/bounded_noise.hpp"
#include "ccq/rng.hpp"
#include "ccq/splitting.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ccq {

namespace {

const std::set<std::string> kAlgorithms{"agnostic",     "adaptive_agnostic", "bounded_noise",
                                        "adaptive_alpha", "splitting",       "disagreement"};

const std::map<std::string, std::set<std::string>> kLearnerKeys{
    {"agnostic", {"beta", "c_u", "c_halving", "n_min", "cover_factor", "chunk", "rule", "budget", "policy"}},
    {"adaptive_agnostic",
     {"c_u", "c_halving", "n_min", "cover_factor", "inner_eps_factor", "chunk_inner", "max_j", "policy"}},
    {"bounded_noise", {"alpha", "c_m", "c_u", "c_halving", "n_min", "cover_factor", "max_batches", "policy"}},
    {"adaptive_alpha", {"c_m", "c_u", "c_halving", "n_min", "cover_factor", "max_batches", "c_b", "policy"}},
    {"splitting", {"alpha", "tau", "c0", "c_s", "c_e", "mode", "policy"}},
    {"disagreement", {"alpha", "c_m", "cover_factor", "max_batches", "policy"}},
};

void check_keys(const toml::Table& t, const std::string& table, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : t) {
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in [" + table + "]");
    }
}

template <class T, class F>
std::vector<T> axis(const toml::Document& doc, const std::string& key, std::vector<T> dflt, F conv) {
    const toml::Value* v = doc.find("sweep", key);
    if (!v) return dflt;
    std::vector<T> out;
    if (v->is_array()) {
        for (const auto& e : v->as_array()) out.push_back(conv(e));
    } else {
        out.push_back(conv(*v));
    }
    if (out.empty()) {
        throw ConfigError("sweep axis '" + key + "' is empty; usage: " + key + " = [v1, v2, ...]");
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string substitute(std::string s, const Cell& c) {
    auto rep = [&](const std::string& key, const std::string& val) {
        for (std::size_t p; (p = s.find(key)) != std::string::npos;) s.replace(p, key.size(), val);
    };
    rep("{d}", std::to_string(c.d));
    rep("{k}", std::to_string(c.k));
    return s;
}

struct Params {
    const toml::Table& t;
    double num(const std::string& k, double d) const {
        auto it = t.find(k);
        return it == t.end() ? d : it->second.as_double();
    }
    std::int64_t integer(const std::string& k, std::int64_t d) const {
        auto it = t.find(k);
        return it == t.end() ? d : it->second.as_int();
    }
    bool flag(const std::string& k, bool d) const {
        auto it = t.find(k);
        return it == t.end() ? d : it->second.as_bool();
    }
    std::string str(const std::string& k, const std::string& d) const {
        auto it = t.find(k);
        return it == t.end() ? d : it->second.as_string();
    }
    bool has(const std::string& k) const { return t.count(k) > 0; }
    // "eta" (the cell's noise level) or a number
    double level(const std::string& k, double eta) const {
        auto it = t.find(k);
        if (it == t.end()) return eta;
        if (it->second.is_string()) {
            if (it->second.as_string() != "eta") throw ConfigError("'" + k + "' must be a number or \"eta\"");
            return eta;
        }
        return it->second.as_double();
    }
};

double cover_radius(const ExperimentConfig& cfg, double eps) {
    Params p{cfg.learner.params};
    return std::min(1.0, p.num("cover_factor", 0.5) * eps);
}

AnswerPolicy policy_of(const Params& p) {
    const std::string s = p.str("policy", "first_index");
    if (s == "first_index") return AnswerPolicy::FirstIndex;
    if (s == "uniform_random") return AnswerPolicy::UniformRandom;
    throw ConfigError("policy must be first_index or uniform_random");
}

AdaptiveAgnosticConfig adaptive_config(const ExperimentConfig& cfg) {
    const Params p{cfg.learner.params};
    AdaptiveAgnosticConfig c;
    c.base.c_u = p.num("c_u", c.base.c_u);
    c.base.c_halving = p.num("c_halving", c.base.c_halving);
    c.base.n_min = static_cast<std::size_t>(p.integer("n_min", static_cast<std::int64_t>(c.base.n_min)));
    c.base.cover_factor = p.num("cover_factor", c.base.cover_factor);
    c.inner_eps_factor = p.num("inner_eps_factor", c.inner_eps_factor);
    c.chunk_inner = p.flag("chunk_inner", c.chunk_inner);
    c.max_j = static_cast<int>(p.integer("max_j", c.max_j));
    return c;
}

}  // namespace

ExperimentConfig parse_config(const toml::Document& doc) {
    ExperimentConfig c;
    for (const auto& [name, t] : doc.tables) {
        static const std::set<std::string> known{"", "experiment", "space", "distribution", "learner", "sweep"};
        if (!known.count(name)) throw ConfigError("unknown table [" + name + "]");
    }
    try {
        check_keys(doc.tables.at(""), "top level", {"schema_version"});
        if (auto v = doc.find("", "schema_version")) c.schema_version = static_cast<int>(v->as_int());
        if (c.schema_version != kSchemaVersion) {
            throw ConfigError("unsupported schema_version " + std::to_string(c.schema_version) + " (expected " +
                              std::to_string(kSchemaVersion) + ")");
        }
        if (doc.tables.count("experiment")) {
            check_keys(doc.tables.at("experiment"), "experiment",
                       {"name", "trials", "seed", "output", "threads", "record_timing", "capacity"});
        }
        if (auto v = doc.find("experiment", "name")) c.name = v->as_string();
        if (auto v = doc.find("experiment", "trials")) {
            if (v->as_int() < 1) throw ConfigError("trials must be at least 1");
            c.trials = static_cast<std::size_t>(v->as_int());
        }
        if (auto v = doc.find("experiment", "seed")) c.seed = static_cast<std::uint64_t>(v->as_int());
        if (auto v = doc.find("experiment", "output")) c.output = v->as_string();
        if (auto v = doc.find("experiment", "threads")) c.threads = static_cast<int>(v->as_int());
        if (auto v = doc.find("experiment", "record_timing")) c.record_timing = v->as_bool();
        if (auto v = doc.find("experiment", "capacity")) {
            if (v->as_int() < 1) throw ConfigError("capacity must be positive");
            c.capacity = static_cast<std::size_t>(v->as_int());
        }

        if (doc.tables.count("space")) check_keys(doc.tables.at("space"), "space", {"spec"});
        if (auto v = doc.find("space", "spec")) c.space = v->as_string();

        if (doc.tables.count("distribution")) {
            check_keys(doc.tables.at("distribution"), "distribution", {"kind", "target", "b", "flip"});
        }
        if (auto v = doc.find("distribution", "kind")) c.distribution.kind = v->as_string();
        static const std::set<std::string> kinds{"realizable", "rcn", "bounded", "agnostic_hard"};
        if (!kinds.count(c.distribution.kind)) throw ConfigError("unknown distribution kind '" + c.distribution.kind + "'");
        if (auto v = doc.find("distribution", "target")) {
            c.distribution.target = v->is_int() ? std::to_string(v->as_int()) : v->as_string();
        }
        if (auto v = doc.find("distribution", "b")) {
            for (const auto& e : v->as_array()) c.distribution.b.push_back(static_cast<int>(e.as_int()));
        }
        if (auto v = doc.find("distribution", "flip")) c.distribution.flip = v->as_string();
        if (c.distribution.flip != "constant" && c.distribution.flip != "random") {
            throw ConfigError("flip must be constant or random");
        }

        if (doc.tables.count("learner")) {
            for (const auto& [k, v] : doc.tables.at("learner")) {
                if (k == "algorithm") c.learner.algorithm = v.as_string();
                else if (k == "delta") c.learner.delta = v.as_double();
                else c.learner.params.emplace(k, v);
            }
        }
        if (!kAlgorithms.count(c.learner.algorithm)) throw ConfigError("unknown algorithm '" + c.learner.algorithm + "'");
        check_keys(c.learner.params, "learner", kLearnerKeys.at(c.learner.algorithm));
        if (!(c.learner.delta > 0.0 && c.learner.delta < 1.0)) throw ConfigError("delta must be in (0,1)");

        if (doc.tables.count("sweep")) check_keys(doc.tables.at("sweep"), "sweep", {"eps", "eta", "d", "k"});
        auto dbl = [](const toml::Value& v) { return v.as_double(); };
        auto integer = [](const toml::Value& v) { return static_cast<int>(v.as_int()); };
        c.eps = axis<double>(doc, "eps", {}, dbl);
        if (c.eps.empty()) throw ConfigError("sweep axis 'eps' is required; usage: eps = [0.05, 0.1]");
        c.eta = axis<double>(doc, "eta", {0.0}, dbl);
        c.d = axis<int>(doc, "d", {0}, integer);
        c.k = axis<int>(doc, "k", {2}, integer);
    } catch (const toml::ParseError& e) {
        throw ConfigError(e.what());
    }
    for (double e : c.eps) {
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps values must be in (0,1)");
    }
    for (double e : c.eta) {
        if (!(e >= 0.0 && e < 0.5)) throw ConfigError("eta values must be in [0, 1/2)");
    }
    for (int k : c.k) {
        if (k < 2 || k > kMaxLabels) throw ConfigError("k values must be in [2, 255]");
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    try {
        return parse_config(toml::parse_file(path));
    } catch (const toml::ParseError& e) {
        throw ConfigError(e.what());
    }
}

std::vector<Cell> make_cells(const ExperimentConfig& cfg) {
    std::vector<Cell> cells;
    for (double eta : cfg.eta) {
        for (double eps : cfg.eps) {
            for (int d : cfg.d) {
                for (int k : cfg.k) {
                    Cell c;
                    c.index = cells.size();
                    c.eps = eps;
                    c.eta = eta;
                    c.d = d;
                    c.k = k;
                    cells.push_back(c);
                }
            }
        }
    }
    return cells;
}

std::shared_ptr<const CellContext> make_context(const ExperimentConfig& cfg, const Cell& cell) {
    auto ctx = std::make_shared<CellContext>();
    ctx->cell = cell;
    const std::string spec = substitute(cfg.space, cell);
    try {
        ctx->bundle = parse_space_spec(spec);
    } catch (const Error& e) {
        throw ConfigError(std::string("space: ") + e.what());
    }
    auto& B = *ctx->bundle;
    if (cfg.space.find("{k}") == std::string::npos) ctx->cell.k = B.space.k();
    if (cfg.space.find("{d}") == std::string::npos) ctx->cell.d = dimension_of(B.space, B.domain);
    const auto& dc = cfg.distribution;

    if (dc.kind == "agnostic_hard") {
        AgnosticHardSpec h;
        h.d = B.space.domain_size();
        h.eta = cell.eta;
        h.eps = cell.eps;
        h.k = B.space.k();
        h.b = dc.b.empty() ? std::vector<int>(h.d - 1, 1) : dc.b;
        try {
            ctx->truth = build_distribution(h);
        } catch (const Error& e) {
            throw ConfigError(std::string("distribution: ") + e.what());
        }
        B.domain = ctx->truth.domain;
    } else {
        std::size_t row;
        const std::size_t m = B.space.size();
        if (dc.target == "middle") row = m / 2;
        else if (dc.target == "first") row = 0;
        else if (dc.target == "last") row = m - 1;
        else {
            try {
                row = static_cast<std::size_t>(std::stoull(dc.target));
            } catch (const std::exception&) {
                throw ConfigError("target must be a row index, middle, first or last");
            }
            if (row >= m) throw ConfigError("target row out of range");
        }
        Hypothesis t = B.space.hypothesis(row);
        const int k = B.space.k();
        if (dc.kind == "realizable") {
            ctx->truth = build_distribution(RealizableSpec{B.domain, k, t});
        } else if (dc.kind == "rcn") {
            ctx->truth = build_distribution(RcnSpec{B.domain, k, t, cell.eta});
        } else {
            BoundedSpec s{B.domain, k, t, cell.eta, {}, {}};
            s.flip.assign(B.domain.size(), cell.eta);
            if (dc.flip == "random") {
                Rng rng(derive_seed(cfg.seed, {cell.index, 0xb0u}));
                for (double& f : s.flip) f = cell.eta * unit_real(rng);
            }
            ctx->truth = build_distribution(s);
        }
    }
    double best = 1.0;
    for (std::size_t i = 0; i < B.space.size(); ++i) best = std::min(best, true_error(B.space.row(i), ctx->truth));
    ctx->noise_rate = best;

    const auto& alg = cfg.learner.algorithm;
    if (alg == "agnostic" || alg == "bounded_noise" || alg == "adaptive_alpha") {
        ctx->cover.emplace(epsilon_cover(B.space, B.domain, cover_radius(cfg, cell.eps)));
    } else if (alg == "adaptive_agnostic") {
        ctx->cover.emplace(epsilon_cover(B.space, B.domain, adaptive_cover_radius(cell.eps, adaptive_config(cfg))));
    }
    return ctx;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t cell, std::size_t trial) {
    return derive_seed(base, {0x63656c6cULL, cell, trial});
}

TrialRecord run_trial(const ExperimentConfig& cfg, const CellContext& ctx, std::size_t trial, std::uint64_t seed) {
    TrialRecord rec;
    rec.cell = ctx.cell;
    rec.trial = trial;
    rec.seed = seed;
    rec.target = ctx.noise_rate + ctx.cell.eps;
    const auto t0 = std::chrono::steady_clock::now();
    const auto& space = ctx.bundle->space;
    const auto& dom = ctx.bundle->domain;
    const double eps = ctx.cell.eps;
    const double delta = cfg.learner.delta;
    const Params p{cfg.learner.params};
    const auto& alg = cfg.learner.algorithm;
    try {
        DataSet ds = DataSet::draw(ctx.truth, std::min<std::size_t>(cfg.capacity, 4096), seed, cfg.capacity);
        QueryLedger ledger;
        Oracle oracle(ds, ledger, policy_of(p), derive_seed(seed, {0x706f6cULL}));
        std::optional<Hypothesis> h;
        std::string why;
        const int d = dimension_of(space, dom);

        if (alg == "agnostic") {
            AgnosticConfig c;
            c.c_u = p.num("c_u", c.c_u);
            c.c_halving = p.num("c_halving", c.c_halving);
            c.n_min = static_cast<std::size_t>(p.integer("n_min", static_cast<std::int64_t>(c.n_min)));
            c.cover_factor = p.num("cover_factor", c.cover_factor);
            c.dim = d;
            c.seed = derive_seed(seed, {0x68616c76ULL});
            const double beta = p.level("beta", ctx.cell.eta);
            if (p.has("chunk")) {
                const auto& v = cfg.learner.params.at("chunk");
                if (v.is_string()) {
                    if (v.as_string() != "auto") throw ConfigError("chunk must be an integer or \"auto\"");
                    c.chunk_size = static_cast<std::size_t>(std::ceil(1.0 / (beta + eps)));
                } else {
                    c.chunk_size = static_cast<std::size_t>(v.as_int());
                }
            }
            const std::string rule = p.str("rule", "beta_plus_eps");
            if (rule == "beta_only") c.rule = SetSizeRule::BetaOnly;
            else if (rule != "beta_plus_eps") throw ConfigError("rule must be beta_plus_eps or beta_only");
            if (p.has("budget")) c.budget = static_cast<std::size_t>(p.integer("budget", 0));
            auto r = agnostic_learn(oracle, space, dom, beta, eps, delta, c, ctx.cover ? &*ctx.cover : nullptr);
            if (r.ok) h = std::move(r.h);
            else why = r.failure;
        } else if (alg == "adaptive_agnostic") {
            AdaptiveAgnosticConfig c = adaptive_config(cfg);
            c.base.dim = d;
            c.base.seed = derive_seed(seed, {0x68616c76ULL});
            c.cover = ctx.cover ? &*ctx.cover : nullptr;
            auto r = adaptive_agnostic(oracle, space, dom, eps, delta, c);
            if (r.ok) h = std::move(r.h);
            else why = r.failure;
        } else if (alg == "bounded_noise" || alg == "adaptive_alpha" || alg == "disagreement") {
            DisagreementConfig dc;
            dc.c_m = p.num("c_m", dc.c_m);
            dc.cover_factor = p.num("cover_factor", dc.cover_factor);
            dc.max_batches = static_cast<std::size_t>(p.integer("max_batches", static_cast<std::int64_t>(dc.max_batches)));
            dc.dim = d;
            BoundedNoiseConfig bc;
            bc.c_u = p.num("c_u", bc.c_u);
            bc.c_halving = p.num("c_halving", bc.c_halving);
            bc.n_min = static_cast<std::size_t>(p.integer("n_min", static_cast<std::int64_t>(bc.n_min)));
            bc.cover_factor = p.num("cover_factor", bc.cover_factor);
            bc.dim = d;
            bc.seed = derive_seed(seed, {0x616c6731ULL});
            bc.cover = ctx.cover ? &*ctx.cover : nullptr;
            if (alg == "adaptive_alpha") {
                AdaptiveAlphaConfig ac;
                ac.base = bc;
                ac.c_b = p.num("c_b", ac.c_b);
                LearnerFactory f = [&](double a) {
                    return std::make_unique<DisagreementBatchLearner>(space, dom, eps, delta, a, dc);
                };
                auto r = adaptive_alpha(oracle, space, dom, eps, delta, f, ac);
                if (r.ok) h = std::move(r.h);
                else why = r.failure;
            } else {
                const double a = p.level("alpha", ctx.cell.eta);
                DisagreementBatchLearner learner(space, dom, eps, delta, a, dc);
                auto r = alg == "disagreement" ? drive_with_label_requests(oracle, learner)
                                               : bounded_noise_learn(oracle, space, dom, eps, delta, a, learner, bc);
                if (r.ok) h = std::move(r.h);
                else why = r.failure;
            }
        } else if (alg == "splitting") {
            SplittingConfig sc;
            sc.c0 = p.num("c0", sc.c0);
            sc.c_s = p.num("c_s", sc.c_s);
            sc.c_e = p.num("c_e", sc.c_e);
            sc.dim = d;
            const double a = p.level("alpha", ctx.cell.eta);
            const std::string mode = p.str("mode", "label_requests");
            Labeler lab;
            if (mode == "label_requests") lab = label_request_labeler(oracle);
            else if (mode == "ccq") lab = ccq_labeler(oracle);
            else throw ConfigError("mode must be label_requests or ccq");
            auto r = splitting_active_learn(oracle, space, dom, eps, p.num("tau", 0.1), a, delta, lab, sc);
            if (r.ok) h = std::move(r.h);
            else why = r.failure;
        }
        rec.ccq = ledger.ccq_count();
        rec.label_requests = ledger.label_request_count();
        if (h) {
            rec.error = true_error(h->labels, ctx.truth);
            rec.success = rec.error <= rec.target + 1e-12;
            rec.status = "ok";
        } else {
            rec.status = "failure";
            rec.diagnostics = why;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rec.status = "error";
        rec.diagnostics = e.what();
    }
    if (cfg.record_timing) {
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    return rec;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const Cell& cell, std::uint64_t seed) {
    auto ctx = make_context(cfg, cell);
    return run_trial(cfg, *ctx, 0, seed);
}

std::string csv_escape(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string csv_header() {
    return "schema_version,row_type,cell,eps,eta,d,k,trial,seed,error,target,success,ccq,label_requests,wall_time_ms,"
           "status,diagnostics";
}

std::string csv_row(const TrialRecord& r) {
    std::ostringstream os;
    os << kSchemaVersion << ",trial," << r.cell.index << ',' << fmt(r.cell.eps) << ',' << fmt(r.cell.eta) << ','
       << r.cell.d << ',' << r.cell.k << ',' << r.trial << ',' << r.seed << ',' << fmt(r.error) << ','
       << fmt(r.target) << ',' << (r.success ? 1 : 0) << ',' << r.ccq << ',' << r.label_requests << ','
       << fmt(r.wall_ms) << ',' << csv_escape(r.status) << ',' << csv_escape(r.diagnostics);
    return os.str();
}

std::string csv_summary_row(const Cell& c, std::size_t trials, double success_rate, double median_ccq) {
    std::ostringstream os;
    os << kSchemaVersion << ",summary," << c.index << ',' << fmt(c.eps) << ',' << fmt(c.eta) << ',' << c.d << ','
       << c.k << ',' << trials << ",,,," << fmt(success_rate) << ',' << fmt(median_ccq) << ",,,,";
    return os.str();
}

double median(std::vector<double> v) {
    if (v.empty()) throw Error("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SweepResult sweep(const ExperimentConfig& cfg, const std::string& out_path, bool resume,
                  const std::atomic<bool>* stop) {
    const auto cells = make_cells(cfg);
    std::vector<std::shared_ptr<const CellContext>> ctx;
    for (const auto& c : cells) ctx.push_back(make_context(cfg, c));
    const std::size_t total = cells.size() * cfg.trials;
    std::vector<std::vector<std::pair<bool, double>>> acc(cells.size());
    SweepResult res;
    std::size_t g = 0;

    std::vector<std::string> kept;
    if (resume) {
        std::ifstream in(out_path);
        if (!in) throw ConfigError("cannot open " + out_path + " to resume");
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(in, line)) {
            if (!line.empty()) lines.push_back(line);
        }
        if (lines.empty() || lines.back().rfind("#resume,", 0) != 0) {
            throw ConfigError(out_path + " has no resume marker");
        }
        g = std::stoull(lines.back().substr(8));
        lines.pop_back();
        if (lines.empty() || lines.front() != csv_header()) throw ConfigError(out_path + " has an unexpected header");
        if (g > total) throw ConfigError("resume marker beyond the configured sweep");
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const auto f = csv_split(lines[i]);
            if (f.size() < 13 || f[1] != "trial") continue;
            const std::size_t ci = std::stoull(f[2]);
            if (ci >= acc.size()) throw ConfigError(out_path + " does not match the configured sweep");
            acc[ci].emplace_back(f[11] == "1", std::stod(f[12]));
        }
        kept = std::move(lines);
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + out_path);
    if (resume) {
        for (const auto& l : kept) out << l << '\n';
    } else {
        out << csv_header() << '\n';
    }

    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    const std::size_t chunk = static_cast<std::size_t>(std::max(1, 4 * omp_get_max_threads()));
    while (g < total) {
        if (stop && stop->load()) {
            res.interrupted = true;
            break;
        }
        const std::size_t end = std::min(total, g + chunk);
        std::vector<TrialRecord> recs(end - g);
        const auto cnt = static_cast<std::ptrdiff_t>(end - g);
        std::string config_error;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < cnt; ++i) {
            const std::size_t gi = g + static_cast<std::size_t>(i);
            const std::size_t ci = gi / cfg.trials, t = gi % cfg.trials;
            try {
                recs[i] = run_trial(cfg, *ctx[ci], t, trial_seed(cfg.seed, ci, t));
            } catch (const ConfigError& e) {
#pragma omp critical
                config_error = e.what();
            }
        }
        if (!config_error.empty()) throw ConfigError(config_error);
        for (const auto& r : recs) {
            out << csv_row(r) << '\n';
            ++res.trial_rows;
            acc[r.cell.index].emplace_back(r.success, static_cast<double>(r.ccq));
            if (r.trial + 1 == cfg.trials) {
                const auto& a = acc[r.cell.index];
                std::vector<double> q;
                std::size_t ok = 0;
                for (const auto& [s, c] : a) {
                    ok += s;
                    q.push_back(c);
                }
                out << csv_summary_row(ctx[r.cell.index]->cell, a.size(), static_cast<double>(ok) / a.size(),
                                       median(q))
                    << '\n';
                ++res.summary_rows;
            }
        }
        out.flush();
        g = end;
    }
    if (res.interrupted) out << "#resume," << g << '\n';
    res.next_index = g;
    return res;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("fit needs equally many x and y values");
    FitResult r;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            r.warnings.push_back("dropped nonpositive point (" + fmt(x[i]) + ", " + fmt(y[i]) + ")");
            continue;
        }
        r.points.emplace_back(x[i], y[i]);
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 2) throw Error("fit needs at least two positive points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw Error("fit needs at least two distinct x values");
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.ci_lo = r.ci_hi = r.slope;
    return r;
}

FitResult fit_scaling_samples(const std::vector<std::pair<double, double>>& samples, std::size_t bootstrap,
                              std::uint64_t seed) {
    std::map<double, std::vector<double>> groups;
    for (const auto& [x, y] : samples) groups[x].push_back(y);
    std::size_t usable = 0;
    for (const auto& [x, ys] : groups) usable += x > 0.0;
    if (usable < 3) throw ConfigError("fit needs at least 3 positive axis values");
    std::vector<double> xs, ms;
    for (const auto& [x, ys] : groups) {
        xs.push_back(x);
        ms.push_back(median(ys));
    }
    FitResult r = fit_loglog(xs, ms);
    if (bootstrap == 0) return r;
    Rng rng(seed);
    std::vector<double> slopes;
    std::vector<double> re;
    for (std::size_t b = 0; b < bootstrap; ++b) {
        std::vector<double> bm;
        for (const auto& [x, ys] : groups) {
            re.resize(ys.size());
            for (auto& v : re) v = ys[below(rng, ys.size())];
            bm.push_back(median(re));
        }
        try {
            slopes.push_back(fit_loglog(xs, bm).slope);
        } catch (const Error&) {
        }
    }
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        auto q = [&](double p) {
            const double pos = p * static_cast<double>(slopes.size() - 1);
            const auto i = static_cast<std::size_t>(pos);
            const double f = pos - static_cast<double>(i);
            return i + 1 < slopes.size() ? slopes[i] * (1 - f) + slopes[i + 1] * f : slopes[i];
        };
        r.ci_lo = q(0.025);
        r.ci_hi = q(0.975);
    }
    return r;
}

FitResult fit_scaling(const std::string& csv_path, const std::string& axis_name, std::size_t bootstrap,
                      std::uint64_t seed) {
    if (axis_name != "eta" && axis_name != "eps" && axis_name != "d") throw ConfigError("fit axis must be eta, eps or d");
    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(csv_path + " is empty");
    const auto head = csv_split(line);
    auto col = [&](const std::string& n) {
        auto it = std::find(head.begin(), head.end(), n);
        if (it == head.end()) throw ConfigError(csv_path + " lacks column " + n);
        return static_cast<std::size_t>(it - head.begin());
    };
    const std::size_t ct = col("row_type"), cx = col(axis_name), cq = col("ccq");
    std::vector<std::pair<double, double>> samples;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto f = csv_split(line);
        if (f.size() <= std::max({ct, cx, cq}) || f[ct] != "trial") continue;
        double x = std::stod(f[cx]);
        if (axis_name == "eps") x = 1.0 / x;
        samples.emplace_back(x, std::stod(f[cq]));
    }
    return fit_scaling_samples(samples, bootstrap, seed);
}

}  // namespace ccq
