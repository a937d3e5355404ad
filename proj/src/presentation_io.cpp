#include "fedosov/presentation_io.hpp"

#include <fstream>

namespace fedosov {

Json coefficient_to_json(const Coefficient& c) {
    if (c.mode() == BaseMode::Point || c.is_constant()) return rat_to_string(c.value());
    Json out = Json::array();
    for (auto& [j, q] : c.terms()) {
        Json entry = Json::array();
        entry.push_back(j.e);
        entry.push_back(rat_to_string(q));
        out.push_back(entry);
    }
    return out;
}

Coefficient coefficient_from_json(const Json& j, BaseMode mode, int chart_dim) {
    if (j.is_string())
        return Coefficient::constant(mode, chart_dim, rat_from_string(j.get<std::string>()));
    if (j.is_number_integer())
        return Coefficient::constant(mode, chart_dim, Rational(j.get<long>()));
    if (!j.is_array()) throw StructuralError("coefficient JSON must be a string or array");
    Coefficient c = Coefficient::zero(mode, chart_dim);
    for (auto& entry : j) {
        MultiIndex m(chart_dim);
        auto idx = entry.at(0).get<std::vector<int>>();
        if (static_cast<int>(idx.size()) != chart_dim)
            throw StructuralError("chart multi-index width mismatch in coefficient JSON");
        m.e = idx;
        c += Coefficient::monomial(chart_dim, m, rat_from_string(entry.at(1).get<std::string>()));
    }
    return c;
}

Json presentation_to_json(const LiePairPresentation& p) {
    const Frame& f = p.frame();
    Json out;
    out["mode"] = f.mode == BaseMode::Point ? "point" : "chart";
    out["rank_A"] = f.rp;
    out["rank_B"] = f.r;
    out["chart_dim"] = f.n;
    out["truncation_order"] = p.default_trunc();
    Json bracket = Json::array();
    int k = f.rank_total();
    for (int u = 1; u <= k; ++u)
        for (int v = u + 1; v <= k; ++v)
            for (int w = 1; w <= k; ++w)
                if (!p.c(u, v, w).is_zero())
                    bracket.push_back(Json{{"u", u},
                                           {"v", v},
                                           {"w", w},
                                           {"value", coefficient_to_json(p.c(u, v, w))}});
    out["bracket"] = bracket;
    Json anchor = Json::array();
    for (int u = 1; u <= k; ++u)
        for (int mu = 1; mu <= f.n; ++mu)
            if (!p.rho(u, mu).is_zero())
                anchor.push_back(
                    Json{{"u", u}, {"mu", mu}, {"value", coefficient_to_json(p.rho(u, mu))}});
    out["anchor"] = anchor;
    Json offset = Json::array();
    for (int i = 1; i <= f.r; ++i)
        for (int alpha = 1; alpha <= f.rp; ++alpha)
            if (!p.offset().at(f, i, alpha).is_zero())
                offset.push_back(Json{{"i", i},
                                      {"alpha", alpha},
                                      {"value", coefficient_to_json(p.offset().at(f, i, alpha))}});
    out["splitting2_offset"] = offset;
    for (int which : {1, 2}) {
        Json conn = Json::array();
        for (int u = 1; u <= k; ++u)
            for (int i = 1; i <= f.r; ++i)
                for (int j = 1; j <= f.r; ++j)
                    if (!p.connection(which).at(f, u, i, j).is_zero())
                        conn.push_back(Json{
                            {"u", u},
                            {"i", i},
                            {"j", j},
                            {"value", coefficient_to_json(p.connection(which).at(f, u, i, j))}});
        out[which == 1 ? "connection1" : "connection2"] = conn;
    }
    return out;
}

LiePairPresentation presentation_from_json(const Json& j) {
    Frame f;
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "point") {
        f.mode = BaseMode::Point;
        f.n = 0;
    } else if (mode == "chart") {
        f.mode = BaseMode::Chart;
        f.n = j.at("chart_dim").get<int>();
        if (f.n < 1) throw StructuralError("chart mode requires chart_dim >= 1");
    } else {
        throw StructuralError("mode must be 'point' or 'chart'");
    }
    f.rp = j.at("rank_A").get<int>();
    f.r = j.at("rank_B").get<int>();
    if (f.r < 1 || f.rp < 0 || f.rank_total() > 30)
        throw StructuralError("ranks out of range");
    LiePairPresentation p(f, j.value("truncation_order", 4));

    for (auto& e : j.value("bracket", Json::array())) {
        int u = e.at("u").get<int>(), v = e.at("v").get<int>(), w = e.at("w").get<int>();
        p.set_bracket(u, v, w, coefficient_from_json(e.at("value"), f.mode, f.n));
    }
    for (auto& e : j.value("anchor", Json::array())) {
        p.rho(e.at("u").get<int>(), e.at("mu").get<int>()) =
            coefficient_from_json(e.at("value"), f.mode, f.n);
    }
    for (auto& e : j.value("splitting2_offset", Json::array())) {
        p.offset().at(f, e.at("i").get<int>(), e.at("alpha").get<int>()) =
            coefficient_from_json(e.at("value"), f.mode, f.n);
    }
    for (int which : {1, 2}) {
        for (auto& e : j.value(which == 1 ? "connection1" : "connection2", Json::array())) {
            p.connection(which).at(f, e.at("u").get<int>(), e.at("i").get<int>(),
                                   e.at("j").get<int>()) =
                coefficient_from_json(e.at("value"), f.mode, f.n);
        }
    }
    return p;
}

LiePairPresentation load_presentation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open presentation file: " + path);
    Json j = Json::parse(in);
    return presentation_from_json(j);
}

Json formal_function_to_json(const FormalFunction& f) {
    Json out = Json::array();
    for (auto& [key, c] : f.terms()) {
        Json term;
        Json xi = Json::array();
        for (ExtMask t = key.first; t;) {
            int i = __builtin_ctz(t);
            t &= t - 1;
            xi.push_back(i + 1);
        }
        term["xi"] = xi;
        term["eta"] = key.second.e;
        term["coeff"] = coefficient_to_json(c);
        out.push_back(term);
    }
    return out;
}

Json bform_to_json(const BForm& x) {
    Json out = Json::array();
    for (int j = 1; j <= x.rank(); ++j)
        out.push_back(Json{{"component", j}, {"terms", formal_function_to_json(x.comp(j))}});
    return out;
}

Json vertical_operator_to_json(const VerticalOperator& op) {
    Json out = Json::array();
    for (auto& [k, slice] : op.slices())
        out.push_back(Json{{"symbol", k.e}, {"terms", formal_function_to_json(slice)}});
    return out;
}

Json enveloping_to_json(const EnvelopingElement& e) {
    const Frame& f = e.frame();
    Json out = Json::array();
    bool tangent_chart = (f.mode == BaseMode::Chart && f.rp == 0);
    for (auto& [w, c] : e.terms()) {
        Json term;
        if (tangent_chart) {
            std::vector<int> d(f.r, 0);
            for (int u : w) d[u - 1] += 1;
            term["poly"] = coefficient_to_json(c);
            term["derivative_multi_index"] = d;
        } else {
            Json bw = Json::array(), aw = Json::array();
            for (int u : w) (u <= f.r ? bw : aw).push_back(u <= f.r ? u : u - f.r);
            term["coeff"] = coefficient_to_json(c);
            term["b_word"] = bw;
            term["a_word"] = aw;
        }
        out.push_back(term);
    }
    return out;
}

Json jet_map_to_json(const JetMap& f) {
    Json out;
    Json base = Json::array();
    for (auto& b : f.base) base.push_back(rat_to_string(b));
    out["base"] = base;
    out["order"] = f.order;
    Json comps = Json::array();
    for (int k = 1; k <= f.dim; ++k) comps.push_back(coefficient_to_json(f.comps[k - 1]));
    out["components"] = comps;
    return out;
}

} // namespace fedosov
