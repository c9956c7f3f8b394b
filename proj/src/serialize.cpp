#include "gbf/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "gbf/dirac.hpp"

namespace gbf {

namespace {

HComponent parse_component(const std::string& ref,
                           const std::map<std::string, std::string>& aliases) {
    std::string name = ref;
    bool reversed = false;
    if (!name.empty() && name[0] == '~') {
        reversed = true;
        name = name.substr(1);
    }
    auto it = aliases.find(name);
    if (it != aliases.end()) {
        name = it->second;
        reversed = !reversed;
    }
    return {name, reversed};
}

Eigen::VectorXcd parse_flat_real(const json& arr) {
    if (!arr.is_array() || arr.size() % 2 != 0)
        throw std::invalid_argument("lmtilde vectors must be flat [re..., im...] arrays");
    const int d = static_cast<int>(arr.size() / 2);
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i)
        v(i) = cplx(arr[i].get<double>(), arr[d + i].get<double>());
    return v;
}

TheorySpec theory_from_dirac_block(const json& d) {
    const std::string slab = d.value("slab", "t");
    if (slab == "t") {
        dirac::EqualTimeModes modes;
        modes.mass = d.value("mass", 1.0);
        for (const auto& m : d.at("modes"))
            modes.momenta.emplace_back(m[0].get<double>(), m[1].get<double>(), m[2].get<double>());
        std::vector<double> times = d.at("times").get<std::vector<double>>();
        return dirac::build_equal_time_theory(modes, times);
    }
    if (slab == "z") {
        dirac::ConstantZModes modes;
        modes.mass = d.value("mass", 1.0);
        for (const auto& m : d.at("modes"))
            modes.modes.emplace_back(m[0].get<double>(),
                                     Eigen::Vector2d(m[1].get<double>(), m[2].get<double>()));
        std::vector<double> zs = d.at("z").get<std::vector<double>>();
        return dirac::build_constant_z_theory(modes, zs);
    }
    throw std::invalid_argument("dirac block: slab must be \"t\" or \"z\"");
}

}  // namespace

TheorySpec theory_from_json(const json& j) {
    if (j.contains("dirac")) return theory_from_dirac_block(j.at("dirac"));

    TheorySpec th;
    const int kappa = j.at("kappa").get<int>();
    if (kappa != -1 && kappa != 1) throw std::invalid_argument("kappa must be -1 or +1");
    th.stat = (kappa == -1) ? Stat::Fermionic : Stat::Bosonic;

    std::map<std::string, std::string> aliases;
    if (j.contains("orientation_pairs")) {
        for (const auto& p : j.at("orientation_pairs"))
            aliases[p[0].get<std::string>()] = p[1].get<std::string>();
    }

    for (const auto& [label, spec] : j.at("hypersurfaces").items()) {
        KreinSpace s{spec.at("p").get<int>(), spec.at("q").get<int>(), label};
        if (s.p < 0 || s.q < 0 || s.dim() == 0)
            throw std::invalid_argument("hypersurface " + label + ": invalid signature");
        th.spaces[label] = s;
    }

    if (j.contains("regions")) {
        for (const auto& [label, spec] : j.at("regions").items()) {
            Region r;
            r.label = label;
            for (const auto& ref : spec.at("boundary"))
                r.boundary.comps.push_back(parse_component(ref.get<std::string>(), aliases));
            if (spec.contains("lmtilde"))
                for (const auto& v : spec.at("lmtilde")) r.lmtilde.push_back(parse_flat_real(v));
            if (spec.contains("union_of"))
                r.union_of = spec.at("union_of").get<std::vector<std::string>>();
            if (spec.contains("slice_of")) {
                r.slice_of = spec.at("slice_of").get<std::string>();
                r.kind = RegionKind::Slice;
            }
            th.regions.push_back(std::move(r));
        }
    }

    if (j.contains("gluings")) {
        for (const auto& g : j.at("gluings")) {
            GluingDesc d;
            d.name = g.at("name").get<std::string>();
            d.region = g.at("region").get<std::string>();
            d.pos_std = g.at("std").get<int>();
            d.pos_rev = g.at("rev").get<int>();
            d.result = g.at("result").get<std::string>();
            th.gluings.push_back(std::move(d));
        }
    }

    // Structural validation with line-free but precise messages.
    for (const auto& r : th.regions) {
        DirectSum ds = th.boundary_sum(r);  // throws on unknown labels
        for (const auto& v : r.lmtilde)
            if (v.size() != ds.total.dim())
                throw std::invalid_argument("region " + r.label +
                                            ": lmtilde vector length does not match the boundary dimension");
    }
    for (const auto& g : th.gluings) {
        const Region& m = th.region(g.region);
        (void)th.region(g.result);
        const int nc = static_cast<int>(m.boundary.comps.size());
        if (g.pos_std < 0 || g.pos_std >= nc || g.pos_rev < 0 || g.pos_rev >= nc ||
            g.pos_std == g.pos_rev)
            throw std::invalid_argument("gluing " + g.name + ": component positions out of range");
    }
    return th;
}

TheorySpec load_theory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open spec file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec parse error: ") + e.what());
    }
    return theory_from_json(j);
}

json theory_to_json(const TheorySpec& theory) {
    json j;
    j["kappa"] = theory.kappa();
    json hs = json::object();
    for (const auto& [label, s] : theory.spaces) hs[label] = json{{"p", s.p}, {"q", s.q}};
    j["hypersurfaces"] = hs;
    json regions = json::object();
    for (const auto& r : theory.regions) {
        json rj;
        json bd = json::array();
        for (const auto& c : r.boundary.comps) bd.push_back(c.reversed ? "~" + c.label : c.label);
        rj["boundary"] = bd;
        json lm = json::array();
        for (const auto& v : r.lmtilde) {
            json flat = json::array();
            for (int i = 0; i < v.size(); ++i) flat.push_back(v(i).real());
            for (int i = 0; i < v.size(); ++i) flat.push_back(v(i).imag());
            lm.push_back(flat);
        }
        rj["lmtilde"] = lm;
        if (!r.union_of.empty()) rj["union_of"] = r.union_of;
        if (!r.slice_of.empty()) rj["slice_of"] = r.slice_of;
        regions[r.label] = rj;
    }
    j["regions"] = regions;
    json gl = json::array();
    for (const auto& g : theory.gluings)
        gl.push_back(json{{"name", g.name},
                          {"region", g.region},
                          {"std", g.pos_std},
                          {"rev", g.pos_rev},
                          {"result", g.result}});
    j["gluings"] = gl;
    return j;
}

StateDescription state_from_json(const json& j, int dim) {
    StateDescription out;
    for (const auto& t : j.at("terms")) {
        StateDescription::Term term;
        const auto& c = t.at("coeff");
        term.coeff = cplx(c[0].get<double>(), c[1].get<double>());
        for (const auto& vec : t.at("vectors")) {
            if (static_cast<int>(vec.size()) != dim)
                throw std::invalid_argument("state vector length does not match the boundary dimension");
            Eigen::VectorXcd v(dim);
            for (int i = 0; i < dim; ++i)
                v(i) = cplx(vec[i][0].get<double>(), vec[i][1].get<double>());
            term.vectors.push_back(std::move(v));
        }
        out.terms.push_back(std::move(term));
    }
    return out;
}

StateDescription load_state(const std::string& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("state parse error: ") + e.what());
    }
    return state_from_json(j, dim);
}

json report_to_json(const Report& rep) {
    json checks = json::array();
    for (const auto& i : rep.items) {
        json c;
        c["name"] = i.name;
        c["ref"] = i.ref;
        c["residual"] = i.residual;
        c["verdict"] = verdict_name(i.verdict);
        if (!i.note.empty()) c["note"] = i.note;
        checks.push_back(c);
    }
    json j;
    j["checks"] = checks;
    j["summary"] = json{{"pass", rep.all_pass()},
                        {"ill_defined", rep.any_ill_defined()},
                        {"max_residual", rep.max_residual()},
                        {"count", rep.items.size()}};
    return j;
}

}  // namespace gbf
