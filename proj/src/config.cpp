#include "snse/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace snse {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

[[noreturn]] void fail(const std::string& key, int line, const std::string& why) {
    throw std::invalid_argument("config: key '" + key + "' (line " +
                                std::to_string(line) + "): " + why);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

const std::set<std::string> kKnownKeys = {
    "sim.trunc_n", "sim.nu", "sim.dt", "sim.t_final", "sim.stop_m",
    "sim.stop_mtilde", "sim.nonlinear",
    "u0.modes",
    "noise.kind", "noise.sigma", "noise.alpha", "noise.modes",
    "control.cap_k", "control.state_radius", "control.gains", "control.base",
    "cost.kind", "cost.eps", "cost.lip_l", "cost.target",
    "mc.paths", "mc.seed", "mc.label",
    "experiment.n_list", "experiment.scheme", "experiment.s_list",
    "experiment.dt_list", "experiment.t_list", "experiment.delta",
    "experiment.samples", "experiment.instances", "experiment.budget",
    "experiment.lower", "experiment.upper", "experiment.slots",
};

class Parser {
public:
    explicit Parser(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
        std::string line;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: line " + std::to_string(ln) +
                                            ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!kKnownKeys.count(key))
                throw std::invalid_argument("config: line " + std::to_string(ln) +
                                            ": unknown key '" + key + "'");
            if (entries_.count(key)) fail(key, ln, "duplicate key");
            entries_[key] = Entry{value, ln, false};
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const Entry& require(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end())
            throw std::invalid_argument("config: missing required key '" + key + "'");
        it->second.used = true;
        return it->second;
    }

    const Entry* get(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double num(const std::string& key) {
        const Entry& e = require(key);
        return parse_num(key, e);
    }

    double num_or(const std::string& key, double fallback) {
        const Entry* e = get(key);
        return e ? parse_num(key, *e) : fallback;
    }

    long long integer(const std::string& key) {
        const Entry& e = require(key);
        return parse_int(key, e);
    }

    long long integer_or(const std::string& key, long long fallback) {
        const Entry* e = get(key);
        return e ? parse_int(key, *e) : fallback;
    }

    std::string text(const std::string& key) { return require(key).value; }

    std::vector<std::pair<std::string, std::string>> echo() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [k, e] : entries_) out.emplace_back(k, e.value);
        return out;
    }

    static double parse_num(const std::string& key, const Entry& e) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            fail(key, e.line, "expected a number, got '" + e.value + "'");
        }
    }

    static long long parse_int(const std::string& key, const Entry& e) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            fail(key, e.line, "expected an integer, got '" + e.value + "'");
        }
    }

    std::map<std::string, Entry> entries_;
};

Mode parse_mode(const std::string& key, int line, const std::string& sx,
                const std::string& sy) {
    try {
        return Mode{std::stoi(sx), std::stoi(sy)};
    } catch (const std::exception&) {
        fail(key, line, "bad mode '" + sx + ":" + sy + "'");
    }
}

/// "kx:ky:re:im, kx:ky:re:im, ..." -> field amplitudes
SpectralField parse_field(const std::string& key, const Entry& e, int trunc) {
    SpectralField f(trunc);
    for (const std::string& item : split(e.value, ',')) {
        if (item.empty()) continue;
        const auto parts = split(item, ':');
        if (parts.size() != 4) fail(key, e.line, "expected kx:ky:re:im, got '" + item + "'");
        const Mode k = parse_mode(key, e.line, parts[0], parts[1]);
        try {
            require_mode(k, trunc);
            f.set(k, cplx{std::stod(parts[2]), std::stod(parts[3])});
        } catch (const std::exception& ex) {
            fail(key, e.line, ex.what());
        }
    }
    return f;
}

std::vector<double> parse_list(const std::string& key, const Entry& e) {
    std::vector<double> out;
    for (const std::string& item : split(e.value, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(key, e.line, "expected a number, got '" + item + "'");
        }
    }
    if (out.empty()) fail(key, e.line, "empty list");
    return out;
}

}  // namespace

RunSpec parse_config(const std::string& path) {
    Parser p(path);
    RunSpec spec;

    spec.sim.trunc_n = static_cast<int>(p.integer("sim.trunc_n"));
    spec.sim.nu = p.num("sim.nu");
    spec.sim.dt = p.num("sim.dt");
    spec.sim.t_final = p.num("sim.t_final");
    spec.sim.stop_m = p.num("sim.stop_m");
    spec.sim.stop_mtilde = p.num("sim.stop_mtilde");
    if (const Entry* e = p.get("sim.nonlinear")) {
        if (e->value == "true") spec.sim.nonlinear = true;
        else if (e->value == "false") spec.sim.nonlinear = false;
        else fail("sim.nonlinear", e->line, "expected true or false");
    }
    spec.sim.u0 = parse_field("u0.modes", p.require("u0.modes"), spec.sim.trunc_n);
    try {
        spec.sim.validate();
    } catch (const std::exception& ex) {
        throw std::invalid_argument(std::string("config: ") + ex.what());
    }

    const Entry& nk = p.require("noise.kind");
    if (nk.value == "off") {
        spec.noise = NoiseModel{};
    } else {
        NoiseKind kind;
        if (nk.value == "additive") kind = NoiseKind::Additive;
        else if (nk.value == "diagonal-multiplicative") kind = NoiseKind::DiagonalMultiplicative;
        else fail("noise.kind", nk.line, "expected off | additive | diagonal-multiplicative");
        const Entry& nm = p.require("noise.modes");
        std::vector<Mode> forced;
        for (const std::string& item : split(nm.value, ',')) {
            if (item.empty()) continue;
            const auto parts = split(item, ':');
            if (parts.size() != 2) fail("noise.modes", nm.line, "expected kx:ky");
            const Mode k = parse_mode("noise.modes", nm.line, parts[0], parts[1]);
            try {
                require_mode(k, spec.sim.trunc_n);
            } catch (const std::exception& ex) {
                fail("noise.modes", nm.line, ex.what());
            }
            forced.push_back(k);
        }
        try {
            spec.noise = NoiseModel(kind, p.num("noise.sigma"), p.num("noise.alpha"),
                                    std::move(forced));
        } catch (const std::exception& ex) {
            fail("noise.kind", nk.line, ex.what());
        }
    }

    if (p.has("control.gains") || p.has("control.base") || p.has("control.cap_k")) {
        const double cap = p.num("control.cap_k");
        const double radius =
            p.num_or("control.state_radius", spec.sim.stop_m + spec.sim.stop_mtilde);
        const double horizon = spec.sim.t_final;
        std::map<std::pair<int, int>, ControlEntry> entries;
        auto entry_for = [&](Mode k) -> ControlEntry& {
            auto [it, fresh] = entries.try_emplace({k.kx, k.ky});
            if (fresh) {
                it->second.k = k;
                it->second.gain = TimeProfile<double>::constant(horizon, 0.0);
                it->second.base = TimeProfile<cplx>::constant(horizon, cplx{0, 0});
            }
            return it->second;
        };
        if (const Entry* e = p.get("control.gains")) {
            // items "kx:ky:v0[:v1:...]"; breakpoints uniform on [0,T]
            for (const std::string& item : split(e->value, ',')) {
                if (item.empty()) continue;
                const auto parts = split(item, ':');
                if (parts.size() < 3) fail("control.gains", e->line, "expected kx:ky:v0[:v1...]");
                const Mode k = parse_mode("control.gains", e->line, parts[0], parts[1]);
                TimeProfile<double> prof;
                const std::size_t nb = parts.size() - 2;
                for (std::size_t i = 0; i < nb; ++i) {
                    prof.t.push_back(nb == 1 ? horizon * i : horizon * i / double(nb - 1));
                    try {
                        prof.v.push_back(std::stod(parts[2 + i]));
                    } catch (const std::exception&) {
                        fail("control.gains", e->line, "bad gain value '" + parts[2 + i] + "'");
                    }
                }
                if (nb == 1) {
                    prof.t = {0.0, horizon};
                    prof.v = {prof.v[0], prof.v[0]};
                }
                entry_for(k).gain = std::move(prof);
            }
        }
        if (const Entry* e = p.get("control.base")) {
            // items "kx:ky:re0:im0[:re1:im1...]"
            for (const std::string& item : split(e->value, ',')) {
                if (item.empty()) continue;
                const auto parts = split(item, ':');
                if (parts.size() < 4 || parts.size() % 2 != 0)
                    fail("control.base", e->line, "expected kx:ky:re0:im0[:re1:im1...]");
                const Mode k = parse_mode("control.base", e->line, parts[0], parts[1]);
                TimeProfile<cplx> prof;
                const std::size_t nb = (parts.size() - 2) / 2;
                for (std::size_t i = 0; i < nb; ++i) {
                    prof.t.push_back(nb == 1 ? horizon * i : horizon * i / double(nb - 1));
                    try {
                        prof.v.push_back(cplx{std::stod(parts[2 + 2 * i]),
                                              std::stod(parts[3 + 2 * i])});
                    } catch (const std::exception&) {
                        fail("control.base", e->line, "bad base value in '" + item + "'");
                    }
                }
                if (nb == 1) {
                    prof.t = {0.0, horizon};
                    prof.v = {prof.v[0], prof.v[0]};
                }
                entry_for(k).base = std::move(prof);
            }
        }
        std::vector<ControlEntry> list;
        for (auto& [_, e] : entries) list.push_back(std::move(e));
        try {
            spec.control = FeedbackControl(horizon, cap, radius, std::move(list));
        } catch (const std::exception& ex) {
            throw std::invalid_argument(std::string("config: control block: ") + ex.what());
        }
    }

    if (p.has("cost.kind")) {
        const Entry& ck = p.require("cost.kind");
        CostSpec cs;
        if (ck.value == "vorticity") cs.kind = CostKind::Vorticity;
        else if (ck.value == "v-tracking") cs.kind = CostKind::VTracking;
        else fail("cost.kind", ck.line, "expected vorticity | v-tracking");
        cs.eps = p.num("cost.eps");
        if (!(cs.eps > 0.0 && cs.eps < 1.0))
            fail("cost.eps", p.require("cost.eps").line, "cost.eps must be in (0,1)");
        cs.lip_l = p.num_or("cost.lip_l", 1.0);
        if (const Entry* e = p.get("cost.target"))
            cs.target = parse_field("cost.target", *e, spec.sim.trunc_n);
        try {
            cs.validate();
        } catch (const std::exception& ex) {
            fail("cost.kind", ck.line, ex.what());
        }
        spec.cost = std::move(cs);
    }

    spec.mc_paths = static_cast<int>(p.integer("mc.paths"));
    if (spec.mc_paths < 1)
        fail("mc.paths", p.require("mc.paths").line, "must be >= 1");
    spec.mc_seed = static_cast<std::uint64_t>(p.integer("mc.seed"));
    if (const Entry* e = p.get("mc.label")) spec.label = e->value;

    if (const Entry* e = p.get("experiment.n_list")) {
        for (double v : parse_list("experiment.n_list", *e)) {
            if (v < 1 || v != std::floor(v))
                fail("experiment.n_list", e->line, "entries must be positive integers");
            spec.n_list.push_back(static_cast<int>(v));
        }
    }
    if (const Entry* e = p.get("experiment.scheme")) {
        if (e->value == "gain-scale") spec.scheme = SequenceScheme::GainScale;
        else if (e->value == "mode-truncate") spec.scheme = SequenceScheme::ModeTruncate;
        else if (e->value == "time-mollify") spec.scheme = SequenceScheme::TimeMollify;
        else fail("experiment.scheme", e->line,
                  "expected gain-scale | mode-truncate | time-mollify");
    }
    if (const Entry* e = p.get("experiment.s_list"))
        spec.s_list = parse_list("experiment.s_list", *e);
    if (const Entry* e = p.get("experiment.dt_list"))
        spec.dt_list = parse_list("experiment.dt_list", *e);
    if (const Entry* e = p.get("experiment.t_list"))
        spec.t_list = parse_list("experiment.t_list", *e);
    spec.delta = p.num_or("experiment.delta", 0.01);
    spec.samples = p.integer_or("experiment.samples", 1000000);
    spec.instances = static_cast<int>(p.integer_or("experiment.instances", 100));
    spec.budget = static_cast<int>(p.integer_or("experiment.budget", 0));
    if (const Entry* e = p.get("experiment.lower"))
        spec.opt_lower = parse_list("experiment.lower", *e);
    if (const Entry* e = p.get("experiment.upper"))
        spec.opt_upper = parse_list("experiment.upper", *e);
    if (const Entry* e = p.get("experiment.slots")) {
        for (const std::string& item : split(e->value, ',')) {
            if (item.empty()) continue;
            const auto parts = split(item, ':');
            if (parts.size() != 3) fail("experiment.slots", e->line, "expected kx:ky:gain|base");
            ParamSlot s;
            s.k = parse_mode("experiment.slots", e->line, parts[0], parts[1]);
            if (parts[2] == "gain") s.kind = ParamSlot::Kind::Gain;
            else if (parts[2] == "base") s.kind = ParamSlot::Kind::Base;
            else fail("experiment.slots", e->line, "slot kind must be gain or base");
            spec.opt_slots.push_back(s);
        }
    }

    spec.echo = p.echo();
    return spec;
}

}  // namespace snse
