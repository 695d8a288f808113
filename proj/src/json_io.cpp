#include "beccert/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace beccert {

namespace {

Json mode_eval_to_json(const ModeEval& m) {
  return {{"label", m.label},   {"n", m.n},           {"u0", m.u0},
          {"u", m.u},           {"dstar", m.dstar},   {"margin", m.margin},
          {"bridge_upper", m.bridge_upper}};
}

ModeEval mode_eval_from_json(const Json& j) {
  ModeEval m;
  m.label = j.at("label").get<std::string>();
  m.n = j.at("n").get<int>();
  m.u0 = j.at("u0").get<double>();
  m.u = j.at("u").get<double>();
  m.dstar = j.at("dstar").get<double>();
  m.margin = j.at("margin").get<double>();
  m.bridge_upper = j.at("bridge_upper").get<double>();
  return m;
}

// JSON has no infinity; an inapplicable bound is stored as null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
double null_as_inf(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json distribution_to_json(const DiscreteDistribution& d) {
  return {{"atoms", std::vector<double>(d.atoms().begin(), d.atoms().end())},
          {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

DiscreteDistribution distribution_from_json(const Json& j) {
  return guarded("distribution", [&] {
    if (!j.is_object()) throw DomainError("distribution must be a JSON object");
    return DiscreteDistribution(j.at("atoms").get<std::vector<double>>(),
                                j.at("probs").get<std::vector<double>>());
  });
}

Json prawitz_to_json(const PrawitzResult& r) {
  return {{"dstar", r.dstar},
          {"margin", r.margin},
          {"integrals", r.integrals},
          {"errors", r.errors},
          {"evaluations", r.evaluations},
          {"converged", r.converged}};
}

Json certificate_to_json(const Certificate& c) {
  Json entries = Json::array();
  for (const auto& e : c.entries) {
    Json je = {{"epsilon", e.epsilon},       {"u0", e.u0},
               {"u", e.u},                   {"dstar", e.dstar},
               {"margin", e.margin},         {"bridged_to", e.bridged_to},
               {"bridge_upper", e.bridge_upper}, {"worst", e.worst}};
    if (!e.n_detail.empty()) {
      Json nd = Json::object();
      for (const auto& [n, m] : e.n_detail) nd[std::to_string(n)] = mode_eval_to_json(m);
      je["n_detail"] = nd;
    }
    if (e.tail) je["tail"] = mode_eval_to_json(*e.tail);
    entries.push_back(std::move(je));
  }
  Json j = {{"schema", c.schema},
            {"mode", c.mode},
            {"target", c.target},
            {"eps_lo", c.eps_lo},
            {"eps_hi", c.eps_hi},
            {"m", c.m},
            {"entries", entries},
            {"large_eps_note",
             {{"threshold", c.large_eps_threshold}, {"bound", "D(eps) <= 1/eps for eps >= threshold"}}},
            {"peak", {{"epsilon", c.peak_epsilon}, {"upper", c.peak_upper}}},
            {"global_bound", finite_or_null(c.global_bound)},
            {"stitched", c.stitched},
            {"config", Json::parse(c.config.empty() ? "{}" : c.config)},
            {"fingerprint", c.fingerprint}};
  if (c.small_eps) {
    const auto& w = *c.small_eps;
    j["small_eps_witness"] = {{"eps_lo", w.eps_lo},       {"at_eps_lo", finite_or_null(w.at_eps_lo)},
                              {"grid_points", w.grid_points}, {"grid_max", finite_or_null(w.grid_max)},
                              {"monotone", w.monotone},   {"passed", w.passed}};
  } else {
    j["small_eps_witness"] = nullptr;
  }
  return j;
}

Certificate certificate_from_json(const Json& j) {
  return guarded("certificate", [&] {
    Certificate c;
    c.schema = j.at("schema").get<std::string>();
    if (c.schema != "v1") throw DomainError("unknown certificate schema '" + c.schema + "'");
    c.mode = j.at("mode").get<std::string>();
    c.target = j.at("target").get<double>();
    c.eps_lo = j.at("eps_lo").get<double>();
    c.eps_hi = j.at("eps_hi").get<double>();
    c.m = j.at("m").get<int>();
    for (const auto& je : j.at("entries")) {
      ScanEntry e;
      e.epsilon = je.at("epsilon").get<double>();
      e.u0 = je.at("u0").get<double>();
      e.u = je.at("u").get<double>();
      e.dstar = je.at("dstar").get<double>();
      e.margin = je.at("margin").get<double>();
      e.bridged_to = je.at("bridged_to").get<double>();
      e.bridge_upper = je.at("bridge_upper").get<double>();
      e.worst = je.at("worst").get<std::string>();
      if (je.contains("n_detail")) {
        for (const auto& [key, value] : je.at("n_detail").items()) {
          e.n_detail[std::stoi(key)] = mode_eval_from_json(value);
        }
      }
      if (je.contains("tail")) e.tail = mode_eval_from_json(je.at("tail"));
      c.entries.push_back(std::move(e));
    }
    c.large_eps_threshold = j.at("large_eps_note").at("threshold").get<double>();
    c.peak_epsilon = j.at("peak").at("epsilon").get<double>();
    c.peak_upper = j.at("peak").at("upper").get<double>();
    c.global_bound = null_as_inf(j.at("global_bound"));
    c.stitched = j.at("stitched").get<bool>();
    c.config = j.at("config").dump();
    c.fingerprint = j.at("fingerprint").get<std::string>();
    if (const auto& w = j.at("small_eps_witness"); !w.is_null()) {
      SmallEpsWitness s;
      s.eps_lo = w.at("eps_lo").get<double>();
      s.at_eps_lo = null_as_inf(w.at("at_eps_lo"));
      s.grid_points = w.at("grid_points").get<int>();
      s.grid_max = null_as_inf(w.at("grid_max"));
      s.monotone = w.at("monotone").get<bool>();
      s.passed = w.at("passed").get<bool>();
      c.small_eps = s;
    }
    return c;
  });
}

std::string certificate_to_csv(const Certificate& c) {
  std::ostringstream out;
  out << "epsilon,u0,u,dstar,margin,certified_from\n";
  char buf[256];
  for (const auto& e : c.entries) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.6e,%.17g\n", e.epsilon, e.u0, e.u,
                  e.dstar, e.margin, e.bridged_to);
    out << buf;
  }
  return out.str();
}

}  // namespace beccert
