#include "pfsim/serialize.hpp"

#include <algorithm>
#include <cstring>

namespace pfsim {

using nlohmann::json;

void require_known_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

json sym2_to_json(const Sym2& s) { return json::array({json::array({s[0][0], s[0][1]}), json::array({s[1][0], s[1][1]})}); }

Sym2 sym2_from_json(const json& j, const std::string& where) {
  Sym2 s{};
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected a 2x2 array");
  for (int r = 0; r < 2; ++r) {
    if (!j[r].is_array() || j[r].size() != 2) throw ConfigError(where + ": expected a 2x2 array");
    for (int c = 0; c < 2; ++c) {
      if (!j[r][c].is_number()) throw ConfigError(where + ": entries must be numbers");
      s[r][c] = j[r][c].get<double>();
    }
  }
  return s;
}

}  // namespace

json to_json(const BulkCoeffs& b) {
  return {{"a1", b.a1}, {"a2", b.a2}, {"a41", b.a41}, {"a42", b.a42}, {"a61", b.a61}};
}

json to_json(const ElasticModel& e) {
  return {{"c11", e.c11},
          {"c12", e.c12},
          {"c44", e.c44},
          {"eigenstrain1", sym2_to_json(e.eigenstrain[0])},
          {"eigenstrain2", sym2_to_json(e.eigenstrain[1])}};
}

json to_json(const SimParams& p) {
  return {{"mobility", p.mobility_m},     {"mobility_poly", p.mobility_poly}, {"kinetic_l", p.kinetic_l},
          {"kappa_c", p.kappa_c},         {"kappa_eta", p.kappa_eta},         {"bulk", to_json(p.bulk)},
          {"elastic", to_json(p.elastic)}, {"dt", p.dt},
          {"spatial_form", std::string(to_string(p.ch_spatial_form))}};
}

json to_json(const LossWeights& w) {
  return {{"data_c", w.data_c},   {"data_eta1", w.data_eta1}, {"data_eta2", w.data_eta2},
          {"pde_ch", w.pde_ch},   {"pde_ac1", w.pde_ac1},     {"pde_ac2", w.pde_ac2}};
}

json to_json(const LossReport& r) {
  const auto& c = r.components;
  return {{"backend", std::string(to_string(r.backend.tag))},
          {"pad", r.backend.pad},
          {"spatial_form", std::string(to_string(r.spatial_form))},
          {"spatial_form_mismatch", r.spatial_form_mismatch},
          {"grid", {r.nx, r.ny}},
          {"frames", r.frames},
          {"dt", r.dt},
          {"weights", to_json(r.weights)},
          {"components",
           {{"data_c", c.data_c},
            {"data_eta1", c.data_eta1},
            {"data_eta2", c.data_eta2},
            {"pde_ch", c.pde_ch},
            {"pde_ac1", c.pde_ac1},
            {"pde_ac2", c.pde_ac2}}},
          {"total", r.total}};
}

BulkCoeffs bulk_from_json(const json& j) {
  const std::string w = "bulk";
  require_known_keys(j, {"a1", "a2", "a41", "a42", "a61"}, w);
  BulkCoeffs b;
  read_opt(j, "a1", b.a1, w);
  read_opt(j, "a2", b.a2, w);
  read_opt(j, "a41", b.a41, w);
  read_opt(j, "a42", b.a42, w);
  read_opt(j, "a61", b.a61, w);
  return b;
}

ElasticModel elastic_from_json(const json& j) {
  const std::string w = "elastic";
  require_known_keys(j, {"c11", "c12", "c44", "eigenstrain1", "eigenstrain2"}, w);
  ElasticModel e;
  read_opt(j, "c11", e.c11, w);
  read_opt(j, "c12", e.c12, w);
  read_opt(j, "c44", e.c44, w);
  if (j.contains("eigenstrain1")) e.eigenstrain[0] = sym2_from_json(j["eigenstrain1"], w + ".eigenstrain1");
  if (j.contains("eigenstrain2")) e.eigenstrain[1] = sym2_from_json(j["eigenstrain2"], w + ".eigenstrain2");
  return e;
}

SimParams params_from_json(const json& j) {
  const std::string w = "physics";
  require_known_keys(j,
                     {"mobility", "mobility_poly", "kinetic_l", "kappa_c", "kappa_eta", "bulk", "elastic", "dt",
                      "spatial_form"},
                     w);
  SimParams p;
  read_opt(j, "mobility", p.mobility_m, w);
  read_opt(j, "mobility_poly", p.mobility_poly, w);
  read_opt(j, "kinetic_l", p.kinetic_l, w);
  read_opt(j, "kappa_c", p.kappa_c, w);
  read_opt(j, "kappa_eta", p.kappa_eta, w);
  read_opt(j, "dt", p.dt, w);
  if (j.contains("bulk")) p.bulk = bulk_from_json(j["bulk"]);
  if (j.contains("elastic")) p.elastic = elastic_from_json(j["elastic"]);
  if (j.contains("spatial_form")) {
    try {
      p.ch_spatial_form = parse_spatial_form(j["spatial_form"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(w + ".spatial_form: " + e.what());
    }
  }
  return p;
}

LossWeights weights_from_json(const json& j) {
  const std::string w = "loss.weights";
  require_known_keys(j, {"data_c", "data_eta1", "data_eta2", "pde_ch", "pde_ac1", "pde_ac2"}, w);
  LossWeights lw;
  read_opt(j, "data_c", lw.data_c, w);
  read_opt(j, "data_eta1", lw.data_eta1, w);
  read_opt(j, "data_eta2", lw.data_eta2, w);
  read_opt(j, "pde_ch", lw.pde_ch, w);
  read_opt(j, "pde_ac1", lw.pde_ac1, w);
  read_opt(j, "pde_ac2", lw.pde_ac2, w);
  return lw;
}

}  // namespace pfsim
