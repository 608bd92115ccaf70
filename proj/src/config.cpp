#include "abq/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace abq::cfg {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw domain_error("malformed number in list: '" + tok + "'");
        out.push_back(v);
    }
    if (out.empty()) throw domain_error("empty numeric list");
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    for (double v : parse_double_list(s)) {
        if (v != std::floor(v)) throw domain_error("expected integer list");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> parse_ini(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw domain_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key.empty()) throw domain_error("config line " + std::to_string(lineno) + ": empty key");
        out[section.empty() ? key : section + "." + key] = val;
    }
    return out;
}

std::map<std::string, std::string> parse_json_cfg(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    std::map<std::string, std::string> out;
    if (!j.is_object()) throw domain_error("JSON config must be an object");
    auto to_str = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_array()) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ',';
                s += v[i].dump();
            }
            return s;
        }
        return v.dump();
    };
    for (auto& [sec, val] : j.items()) {
        if (val.is_object()) {
            for (auto& [k, v] : val.items()) out[sec + "." + k] = to_str(v);
        } else {
            out[sec] = to_str(val);
        }
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "run.alpha",      "run.alphas",     "run.k",          "run.ks",
        "run.lambda",     "run.lambdas",    "run.bracket_lo", "run.bracket_hi",
        "run.seed",       "run.trials",     "run.count",      "run.out",
        "run.r_lo",       "run.r_hi",       "run.nr",         "run.theta",
        "field.type",     "field.B",        "field.cap_radius", "field.path",
        "cutoff.a",       "cutoff.b",
        "beta.b00",       "beta.b11",       "beta.b01_re",    "beta.b01_im",
        "grid.r_max",     "grid.n",         "grid.grading",   "grid.form_r_max",
        "phi.type",       "phi.amp_re",     "phi.amp_im",     "phi.power",
        "phi.sigma",      "phi.mode",
        "charge.q0_re",   "charge.q0_im",   "charge.qm1_re",  "charge.qm1_im",
        "tol.norm_rel",
    };
    return keys;
}

double as_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw domain_error("config key '" + key + "': malformed number '" + v + "'");
    }
}

int as_int(const std::string& key, const std::string& v) {
    double d = as_double(key, v);
    if (d != std::floor(d)) throw domain_error("config key '" + key + "': expected integer");
    return static_cast<int>(d);
}

}  // namespace

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw domain_error("cannot open config file: " + path);
    // sniff: a JSON object starts with '{'
    int c = f.peek();
    while (c != EOF && std::isspace(c)) {
        f.get();
        c = f.peek();
    }
    if (c == '{') return parse_json_cfg(f);
    return parse_ini(f);
}

void apply_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, val] : entries) {
        if (!known_keys().count(key)) throw domain_error("unknown config key: '" + key + "'");
        if (key == "run.alpha" || key == "run.alphas") cfg.alphas = parse_double_list(val);
        else if (key == "run.k" || key == "run.ks") cfg.ks = parse_int_list(val);
        else if (key == "run.lambda" || key == "run.lambdas") cfg.lambdas = parse_double_list(val);
        else if (key == "run.bracket_lo") cfg.bracket_lo = as_double(key, val);
        else if (key == "run.bracket_hi") cfg.bracket_hi = as_double(key, val);
        else if (key == "run.seed") cfg.seed = static_cast<unsigned long>(as_double(key, val));
        else if (key == "run.trials") cfg.trials = as_int(key, val);
        else if (key == "run.count") cfg.count = as_int(key, val);
        else if (key == "run.out") cfg.out = val;
        else if (key == "run.r_lo") cfg.r_lo = as_double(key, val);
        else if (key == "run.r_hi") cfg.r_hi = as_double(key, val);
        else if (key == "run.nr") cfg.nr = as_int(key, val);
        else if (key == "run.theta") cfg.theta = as_double(key, val);
        else if (key == "field.type") cfg.field_type = val;
        else if (key == "field.B") cfg.field_b = as_double(key, val);
        else if (key == "field.cap_radius") cfg.field_cap = as_double(key, val);
        else if (key == "field.path") cfg.field_path = val;
        else if (key == "cutoff.a") cfg.cutoff_a = as_double(key, val);
        else if (key == "cutoff.b") cfg.cutoff_b = as_double(key, val);
        else if (key == "beta.b00") cfg.b00 = as_double(key, val);
        else if (key == "beta.b11") cfg.b11 = as_double(key, val);
        else if (key == "beta.b01_re") cfg.b01_re = as_double(key, val);
        else if (key == "beta.b01_im") cfg.b01_im = as_double(key, val);
        else if (key == "grid.r_max") cfg.r_max = as_double(key, val);
        else if (key == "grid.n") cfg.n_nodes = as_int(key, val);
        else if (key == "grid.grading") cfg.grading = as_double(key, val);
        else if (key == "grid.form_r_max") cfg.form_r_max = as_double(key, val);
        else if (key == "phi.type") cfg.phi_type = val;
        else if (key == "phi.amp_re") cfg.phi_amp_re = as_double(key, val);
        else if (key == "phi.amp_im") cfg.phi_amp_im = as_double(key, val);
        else if (key == "phi.power") cfg.phi_power = as_double(key, val);
        else if (key == "phi.sigma") cfg.phi_sigma = as_double(key, val);
        else if (key == "phi.mode") cfg.phi_mode = as_int(key, val);
        else if (key == "charge.q0_re") cfg.q0_re = as_double(key, val);
        else if (key == "charge.q0_im") cfg.q0_im = as_double(key, val);
        else if (key == "charge.qm1_re") cfg.qm1_re = as_double(key, val);
        else if (key == "charge.qm1_im") cfg.qm1_im = as_double(key, val);
        else if (key == "tol.norm_rel") cfg.tol_norm_rel = as_double(key, val);
    }
}

void validate(const RunConfig& cfg) {
    for (int k : cfg.ks)
        if (k != 0 && k != -1) throw domain_error("k must be 0 or -1");
    for (double l : cfg.lambdas)
        if (!(l > 0.0)) throw domain_error("lambda must be positive");
    if (!(cfg.cutoff_a > 0.0 && cfg.cutoff_b > cfg.cutoff_a))
        throw domain_error("cutoff requires 0 < a < b");
    if (!(cfg.bracket_lo > 0.0 && cfg.bracket_hi > cfg.bracket_lo))
        throw domain_error("bracket requires 0 < lo < hi");
    if (!(cfg.r_max > 0.0) || cfg.n_nodes < 200 || !(cfg.grading >= 1.0))
        throw domain_error("grid requires r_max > 0, n >= 200, grading >= 1");
    if (cfg.count < 1 || cfg.count > 10) throw domain_error("count must lie in [1,10]");
    if (cfg.trials < 1 || cfg.trials > 1000) throw domain_error("trials must lie in [1,1000]");
    if (!(cfg.form_r_max > cfg.cutoff_b)) throw domain_error("form_r_max must exceed cutoff.b");
    if (!(cfg.tol_norm_rel >= 1e-10)) throw domain_error("tol.norm_rel >= 1e-10");
    if (!(cfg.r_lo > 0.0 && cfg.r_hi > cfg.r_lo) || cfg.nr < 2)
        throw domain_error("green dump requires 0 < r_lo < r_hi and nr >= 2");
    if (cfg.field_type != "none" && cfg.field_type != "homogeneous" &&
        cfg.field_type != "homogeneous-capped" && cfg.field_type != "tabulated")
        throw domain_error("field.type must be none|homogeneous|homogeneous-capped|tabulated");
    if (cfg.field_type == "homogeneous-capped" && !(cfg.field_cap > 0.0))
        throw domain_error("field.cap_radius must be positive");
    if (cfg.phi_type != "none" && cfg.phi_type != "gaussian")
        throw domain_error("phi.type must be none|gaussian");
}

namespace {

fields::PerturbationField load_tabulated(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw domain_error("cannot open field table: " + path);
    std::vector<double> rs, ss;
    double r, s;
    while (f >> r >> s) {
        if (!rs.empty() && r <= rs.back())
            throw domain_error("field table: radii must be strictly increasing");
        rs.push_back(r);
        ss.push_back(s);
    }
    if (rs.size() < 2) throw domain_error("field table: need at least two samples");
    if (rs.front() != 0.0 || ss.front() != 0.0)
        throw domain_error("field table: first sample must be (0, 0)");
    double lip = 0.0, sup = 0.0;
    for (std::size_t i = 1; i < rs.size(); ++i) {
        lip = std::max(lip, std::abs(ss[i] - ss[i - 1]) / (rs[i] - rs[i - 1]));
        sup = std::max(sup, std::abs(ss[i]));
    }
    auto profile = [rs, ss](double rr) {
        if (rr <= rs.front()) return ss.front();
        if (rr >= rs.back()) return ss.back();
        auto it = std::upper_bound(rs.begin(), rs.end(), rr);
        std::size_t i = static_cast<std::size_t>(it - rs.begin());
        double t = (rr - rs[i - 1]) / (rs[i] - rs[i - 1]);
        return (1.0 - t) * ss[i - 1] + t * ss[i];
    };
    return fields::PerturbationField::azimuthal(profile, lip, true, sup);
}

}  // namespace

void check_alphas(const RunConfig& cfg, bool allow_zero) {
    for (double a : cfg.alphas) {
        if (allow_zero ? !(a >= 0.0 && a < 1.0) : !(a > 0.0 && a < 1.0))
            throw domain_error(allow_zero ? "alpha must lie in [0,1)" : "alpha must lie in (0,1)");
    }
}

fields::PerturbationField make_field(const RunConfig& cfg) {
    if (cfg.field_type == "none") return fields::PerturbationField::zero();
    if (cfg.field_type == "homogeneous")
        return fields::PerturbationField::homogeneous(cfg.field_b);
    if (cfg.field_type == "homogeneous-capped")
        return fields::PerturbationField::homogeneous_capped(cfg.field_b, cfg.field_cap);
    if (cfg.field_type == "tabulated") return load_tabulated(cfg.field_path);
    throw domain_error("unknown field type: " + cfg.field_type);
}

forms::HermitianCoupling make_beta(const RunConfig& cfg) {
    return {cfg.b00, cfg.b11, cplx{cfg.b01_re, cfg.b01_im}};
}

forms::TrialFunction make_trial(const RunConfig& cfg, double alpha, double lambda) {
    forms::TrialFunction psi;
    psi.alpha = alpha;
    psi.lambda = lambda;
    psi.cutoff = fields::Cutoff(cfg.cutoff_a, cfg.cutoff_b);
    psi.field = make_field(cfg);
    psi.q0 = cplx{cfg.q0_re, cfg.q0_im};
    psi.qm1 = cplx{cfg.qm1_re, cfg.qm1_im};
    if (cfg.phi_type == "gaussian") {
        if (!(cfg.phi_power > 0.0))
            throw domain_error("phi.power must be positive (form-domain decay)");
        if (!(cfg.phi_sigma > 0.0)) throw domain_error("phi.sigma must be positive");
        cplx amp{cfg.phi_amp_re, cfg.phi_amp_im};
        double p = cfg.phi_power, sg = cfg.phi_sigma;
        int m = cfg.phi_mode;
        forms::RegularPart rp;
        rp.value = [=](double r, double th) -> cplx {
            return amp * std::pow(r, p) * std::exp(-sg * r * r) * std::polar(1.0, m * th);
        };
        rp.grad = [=](double r, double th) -> PolarVec {
            cplx v = amp * std::pow(r, p) * std::exp(-sg * r * r) * std::polar(1.0, m * th);
            return {v * (p / r - 2.0 * sg * r), v * cplx(0.0, m) / r};
        };
        rp.vanishing_rate = p;
        psi.phi = rp;
    } else {
        psi.phi = forms::zero_regular_part();
    }
    return psi;
}

}  // namespace abq::cfg
