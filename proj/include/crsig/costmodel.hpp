#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "crsig/errors.hpp"
#include "crsig/scenario.hpp"

namespace crsig::cost {

// Decimal (SI) units throughout.
inline constexpr double kBytesPerTB = 1e12;
inline constexpr double kGBPerTB = 1e3;
inline constexpr double kTBPerPB = 1e3;
inline constexpr double kTBPerEB = 1e6;
inline constexpr double kBytesPerKB = 1e3;

inline constexpr double tb_to_eb(double tb) { return tb / kTBPerEB; }
inline constexpr double eb_to_tb(double eb) { return eb * kTBPerEB; }

/// Closed interval [lo, hi] over non-negative quantities.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr Interval() = default;
  constexpr Interval(double point) : lo(point), hi(point) {}  // NOLINT
  constexpr Interval(double l, double h) : lo(l), hi(h) {}

  constexpr double mid() const { return (lo + hi) / 2; }
  constexpr bool contains(double v) const { return lo <= v && v <= hi; }
  constexpr bool valid() const { return lo <= hi; }

  friend constexpr Interval operator+(Interval a, Interval b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  // Both operands are non-negative, so endpoints multiply directly.
  friend constexpr Interval operator*(Interval a, Interval b) {
    return {a.lo * b.lo, a.hi * b.hi};
  }
  friend constexpr Interval operator/(Interval a, double d) {
    return {a.lo / d, a.hi / d};
  }
  friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

struct ByteRange {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct SignatureSchemeSpec {
  std::string name;
  ByteRange public_key_bytes;
  ByteRange signature_bytes;
  std::optional<std::uint64_t> representative_tx_bytes;

  friend bool operator==(const SignatureSchemeSpec&,
                         const SignatureSchemeSpec&) = default;
};

struct NetworkProfile {
  std::string name;
  Interval node_count;
  NodeClass node_class = NodeClass::kFull;
  Interval annual_growth_gb;

  Interval ten_year_growth_tb() const { return annual_growth_gb * 10.0 / kGBPerTB; }
  friend bool operator==(const NetworkProfile&, const NetworkProfile&) = default;
};

struct OverheadFactors {
  double usable = 1.3;
  double redundancy = 2.0;
  Interval system{2.0, 2.5};
  double deployment = 1.5;
  double lifecycle = 1.5;
  friend bool operator==(const OverheadFactors&, const OverheadFactors&) = default;
};

struct CostAssumptions {
  double signature_multiplier = 50.0;
  double media_price_per_tb = 300.0;
  OverheadFactors overheads;
  Interval overall_multiplier_band{10.0, 20.0};
  double doubling_period_years = 2.0;
  friend bool operator==(const CostAssumptions&, const CostAssumptions&) = default;
};

/// One bar pair of the node-storage projection figure.
struct StorageProjection {
  std::string label;
  double current_tb = 0.0;
  double multiplier = 1.0;
  friend bool operator==(const StorageProjection&, const StorageProjection&) = default;
};

// ---------------------------------------------------------------------------
// Embedded defaults

inline std::vector<SignatureSchemeSpec> default_catalog() {
  const auto kb = [](double v) { return static_cast<std::uint64_t>(v * kBytesPerKB); };
  return {
      {"ECDSA", {64, 64}, {65, 65}, 200},
      {"Dilithium", {kb(1), kb(2.5)}, {kb(2), kb(4.5)}, 3000},
      {"SPHINCS+", {32, 32}, {kb(10), kb(30)}, 20000},
      {"Lamport", {kb(32), kb(32)}, {kb(16), kb(16)}, std::nullopt},
  };
}

inline std::vector<NetworkProfile> default_networks() {
  return {
      {"Bitcoin", 72000.0, NodeClass::kFull, {50.0, 70.0}},
      {"Ethereum (full)", 12000.0, NodeClass::kFull, {150.0, 250.0}},
      {"Ethereum (archive)", 1000.0, NodeClass::kArchive, 2000.0},
      // Litecoin ~1000, Dogecoin ~500, Bitcoin Cash ~500, Bitcoin SV 100..1000;
      // modeled at Bitcoin's per-node growth.
      {"Other UTXO chains", {2100.0, 3000.0}, NodeClass::kFull, {50.0, 70.0}},
  };
}

/// Reachable-only Bitcoin population, as an alternative to the total count.
inline NetworkProfile bitcoin_reachable_profile() {
  return {"Bitcoin (reachable)", {13000.0, 20000.0}, NodeClass::kFull, {50.0, 70.0}};
}

inline std::vector<StorageProjection> default_fig2() {
  return {
      {"Full", 1.2, 50.0},
      {"Archive", 15.0, 800.0 / 15.0},
  };
}

/// Everything the report needs; defaults reproduce the published numbers.
struct CostModel {
  std::vector<SignatureSchemeSpec> catalog = default_catalog();
  std::vector<NetworkProfile> networks = default_networks();
  CostAssumptions assumptions;
  std::vector<StorageProjection> fig2 = default_fig2();
};

// ---------------------------------------------------------------------------
// Calculations

/// Legacy transaction size: 10 base + 148 per input + 34 per output.
inline constexpr std::uint64_t bitcoin_tx_size(std::uint64_t inputs,
                                               std::uint64_t outputs) {
  if (inputs == 0 || outputs == 0) {
    throw DomainError("a transaction needs at least one input and one output");
  }
  return 10 + 148 * inputs + 34 * outputs;
}

struct SegwitWeight {
  std::uint64_t weight = 0;
  std::uint64_t vbytes = 0;
  friend bool operator==(const SegwitWeight&, const SegwitWeight&) = default;
};

inline constexpr std::uint64_t kMaxBlockWeight = 4'000'000;

/// weight = 3 * base + total; witness bytes count a quarter of base bytes.
inline constexpr SegwitWeight segwit_weight(std::uint64_t base_size,
                                            std::uint64_t total_size) {
  if (total_size < base_size) throw DomainError("total size is below base size");
  const std::uint64_t w = 3 * base_size + total_size;
  return {w, (w + 3) / 4};
}

inline const SignatureSchemeSpec& find_scheme(
    const std::vector<SignatureSchemeSpec>& catalog, std::string_view name) {
  const auto it = std::find_if(catalog.begin(), catalog.end(),
                               [&](const auto& s) { return s.name == name; });
  if (it == catalog.end()) {
    throw ConfigError("unknown signature scheme '" + std::string(name) + "'");
  }
  return *it;
}

inline std::uint64_t tx_size_for_scheme(const SignatureSchemeSpec& scheme) {
  if (!scheme.representative_tx_bytes) {
    throw ConfigError("scheme '" + scheme.name +
                      "' has no representative transaction size");
  }
  return *scheme.representative_tx_bytes;
}

inline std::uint64_t tx_size_for_scheme(
    const std::vector<SignatureSchemeSpec>& catalog, std::string_view name) {
  return tx_size_for_scheme(find_scheme(catalog, name));
}

inline double node_storage_projection(double current_tb, double multiplier) {
  if (!(current_tb > 0)) throw DomainError("current storage must be positive");
  if (!(multiplier >= 1)) throw DomainError("multiplier must be >= 1");
  return current_tb * multiplier;
}

struct StorageRow {
  std::string network;
  NodeClass node_class = NodeClass::kFull;
  Interval node_count;
  Interval ten_year_growth_tb;
  double per_node_tb = 0.0;     // at nominal (midpoint) growth
  Interval per_node_tb_range;   // growth range propagated
  Interval total_eb;            // nominal per-node burden x node-count range
  Interval total_eb_full_range; // growth and node-count ranges propagated
};

/// Ten-year additional data per node is 10 x annual growth x multiplier;
/// the network total multiplies by the node population.
inline std::vector<StorageRow> aggregate_storage(
    const std::vector<NetworkProfile>& profiles, const CostAssumptions& a) {
  std::vector<StorageRow> rows;
  for (const NetworkProfile& p : profiles) {
    StorageRow r;
    r.network = p.name;
    r.node_class = p.node_class;
    r.node_count = p.node_count;
    r.ten_year_growth_tb = p.ten_year_growth_tb();
    r.per_node_tb = r.ten_year_growth_tb.mid() * a.signature_multiplier;
    r.per_node_tb_range = r.ten_year_growth_tb * a.signature_multiplier;
    r.total_eb = Interval(r.per_node_tb) * p.node_count / kTBPerEB;
    r.total_eb_full_range = r.per_node_tb_range * p.node_count / kTBPerEB;
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Interval subtotal_eb(const std::vector<StorageRow>& rows) {
  Interval sum(0.0);
  for (const auto& r : rows) sum = sum + r.total_eb;
  return sum;
}

struct InfrastructureCost {
  double raw_usd = 0.0;
  Interval band_usd;
};

/// Raw media cost and the provisioning band over it.
inline InfrastructureCost infrastructure_cost(double total_storage_eb,
                                              const CostAssumptions& a) {
  if (!(total_storage_eb > 0)) throw DomainError("storage must be positive");
  const double raw = eb_to_tb(total_storage_eb) * a.media_price_per_tb;
  return {raw, Interval(raw) * a.overall_multiplier_band};
}

/// Product of the individual provisioning factors. Lands inside, but
/// narrower than, the quoted overall band.
inline Interval component_multiplier_product(const CostAssumptions& a) {
  const OverheadFactors& o = a.overheads;
  return Interval(o.usable) * o.redundancy * o.system * o.deployment * o.lifecycle;
}

inline double hardware_catchup_years(double multiplier,
                                     double doubling_period_years = 2.0) {
  if (!(multiplier >= 1)) throw DomainError("multiplier must be >= 1");
  if (!(doubling_period_years > 0)) throw DomainError("doubling period must be positive");
  return doubling_period_years * std::log2(multiplier);
}

// ---------------------------------------------------------------------------
// Validation and config

inline void validate(const CostModel& m) {
  for (const auto& s : m.catalog) {
    if (s.public_key_bytes.min > s.public_key_bytes.max ||
        s.signature_bytes.min > s.signature_bytes.max) {
      throw ConfigError("scheme '" + s.name + "': min exceeds max");
    }
    if (s.representative_tx_bytes && *s.representative_tx_bytes == 0) {
      throw ConfigError("scheme '" + s.name + "': representative size must be > 0");
    }
  }
  for (const auto& p : m.networks) {
    if (!(p.node_count.lo > 0) || !p.node_count.valid()) {
      throw ConfigError("network '" + p.name + "': node count must be a positive range");
    }
    if (!p.annual_growth_gb.valid() || p.annual_growth_gb.lo < 0) {
      throw ConfigError("network '" + p.name + "': invalid growth range");
    }
  }
  const auto& a = m.assumptions;
  const auto& o = a.overheads;
  for (double f : {a.signature_multiplier, o.usable, o.redundancy, o.system.lo,
                   o.deployment, o.lifecycle, a.overall_multiplier_band.lo}) {
    if (!(f >= 1)) throw ConfigError("cost factors must be >= 1");
  }
  if (!o.system.valid() || !a.overall_multiplier_band.valid()) {
    throw ConfigError("factor range has min > max");
  }
  if (!(a.media_price_per_tb >= 0) || !(a.doubling_period_years > 0)) {
    throw ConfigError("invalid media price or doubling period");
  }
  for (const auto& f : m.fig2) {
    if (!(f.current_tb > 0) || !(f.multiplier >= 1)) {
      throw ConfigError("projection '" + f.label + "' is out of range");
    }
  }
}

namespace detail {

inline Interval interval_from(const nlohmann::json& j) {
  if (j.is_number()) return Interval(j.get<double>());
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or [min, max] pair");
}

inline nlohmann::ordered_json interval_json(const Interval& i) {
  if (i.lo == i.hi) return i.lo;
  return nlohmann::ordered_json::array({i.lo, i.hi});
}

inline ByteRange bytes_from(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return {j.get<std::uint64_t>(), j.get<std::uint64_t>()};
  if (j.is_array() && j.size() == 2) {
    return {j[0].get<std::uint64_t>(), j[1].get<std::uint64_t>()};
  }
  throw ConfigError("expected a byte count or [min, max] pair");
}

inline NodeClass node_class_from(const std::string& s) {
  if (s == "light") return NodeClass::kLight;
  if (s == "full") return NodeClass::kFull;
  if (s == "archive") return NodeClass::kArchive;
  throw ConfigError("unknown node class '" + s + "'");
}

}  // namespace detail

/// Any section that is absent keeps its embedded default.
inline CostModel load_cost_model(const nlohmann::json& j) {
  CostModel m;
  try {
    if (j.contains("catalog")) {
      m.catalog.clear();
      for (const auto& s : j.at("catalog")) {
        SignatureSchemeSpec spec;
        spec.name = s.at("name").get<std::string>();
        spec.public_key_bytes = detail::bytes_from(s.at("public_key_bytes"));
        spec.signature_bytes = detail::bytes_from(s.at("signature_bytes"));
        if (s.contains("representative_tx_bytes") &&
            !s.at("representative_tx_bytes").is_null()) {
          spec.representative_tx_bytes = s.at("representative_tx_bytes").get<std::uint64_t>();
        }
        m.catalog.push_back(std::move(spec));
      }
    }
    if (j.contains("networks")) {
      m.networks.clear();
      for (const auto& n : j.at("networks")) {
        m.networks.push_back({n.at("name").get<std::string>(),
                              detail::interval_from(n.at("node_count")),
                              detail::node_class_from(n.value("node_class", "full")),
                              detail::interval_from(n.at("annual_growth_gb"))});
      }
    }
    if (j.contains("assumptions")) {
      const auto& a = j.at("assumptions");
      auto& out = m.assumptions;
      out.signature_multiplier = a.value("signature_multiplier", out.signature_multiplier);
      out.media_price_per_tb = a.value("media_price_per_tb", out.media_price_per_tb);
      out.doubling_period_years = a.value("doubling_period_years", out.doubling_period_years);
      if (a.contains("overall_multiplier_band")) {
        out.overall_multiplier_band = detail::interval_from(a.at("overall_multiplier_band"));
      }
      if (a.contains("overheads")) {
        const auto& o = a.at("overheads");
        auto& f = out.overheads;
        f.usable = o.value("usable", f.usable);
        f.redundancy = o.value("redundancy", f.redundancy);
        if (o.contains("system")) f.system = detail::interval_from(o.at("system"));
        f.deployment = o.value("deployment", f.deployment);
        f.lifecycle = o.value("lifecycle", f.lifecycle);
      }
    }
    if (j.contains("fig2")) {
      m.fig2.clear();
      for (const auto& f : j.at("fig2")) {
        m.fig2.push_back({f.at("label").get<std::string>(), f.at("current_tb").get<double>(),
                          f.at("multiplier").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cost config: ") + e.what());
  }
  validate(m);
  return m;
}

inline CostModel parse_cost_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("cost config: ") + e.what());
  }
  return load_cost_model(j);
}

// ---------------------------------------------------------------------------
// Report

struct CostReport {
  std::vector<StorageRow> rows;
  Interval subtotal_eb;
  std::string layer2 = "unquantified";
  InfrastructureCost infrastructure;  // from the subtotal midpoint
  Interval component_product;
  double catchup_years_50x = 0.0;
  double catchup_years_100x = 0.0;
  CostAssumptions assumptions;
};

inline CostReport build_report(const CostModel& m) {
  CostReport r;
  r.assumptions = m.assumptions;
  r.rows = aggregate_storage(m.networks, m.assumptions);
  r.subtotal_eb = subtotal_eb(r.rows);
  r.infrastructure = infrastructure_cost(r.subtotal_eb.mid(), m.assumptions);
  r.component_product = component_multiplier_product(m.assumptions);
  r.catchup_years_50x = hardware_catchup_years(50.0, m.assumptions.doubling_period_years);
  r.catchup_years_100x = hardware_catchup_years(100.0, m.assumptions.doubling_period_years);
  return r;
}

/// Shortest decimal that round-trips after rounding to 6 significant digits.
inline std::string num(double v) { return fmt::format("{:.6g}", v); }

/// Whole billions, rounded half away from zero.
inline std::string billions(double usd) {
  return fmt::format("${:.0f}B", std::round(usd / 1e9));
}

inline std::string fig1_csv(const CostModel& m) {
  std::string out = "scheme,tx_bytes\n";
  for (const auto& s : m.catalog) {
    if (!s.representative_tx_bytes) continue;
    out += fmt::format("{},{}\n", s.name, *s.representative_tx_bytes);
  }
  return out;
}

inline std::string fig2_csv(const CostModel& m) {
  std::string out = "bar,storage_tb\n";
  for (const auto& f : m.fig2) {
    out += fmt::format("{} (Current),{}\n", f.label, num(f.current_tb));
    out += fmt::format("{} (PQ),{}\n", f.label,
                       num(node_storage_projection(f.current_tb, f.multiplier)));
  }
  return out;
}

inline std::string table2_csv(const CostModel& m) {
  const auto rows = aggregate_storage(m.networks, m.assumptions);
  std::string out =
      "network,ten_year_growth_tb,per_node_tb,total_eb_min,total_eb_max,total_eb_mid\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.network, num(r.ten_year_growth_tb.mid()),
                       num(r.per_node_tb), num(r.total_eb.lo), num(r.total_eb.hi),
                       num(r.total_eb.mid()));
  }
  const Interval sub = subtotal_eb(rows);
  out += fmt::format("Subtotal,,,{},{},{}\n", num(sub.lo), num(sub.hi), num(sub.mid()));
  return out;
}

inline std::string report_csv(const CostReport& r) {
  std::string out = "item,low,high,mid\n";
  auto row = [&](std::string_view k, Interval v) {
    out += fmt::format("{},{},{},{}\n", k, num(v.lo), num(v.hi), num(v.mid()));
  };
  for (const auto& s : r.rows) row(s.network + " total_eb", s.total_eb);
  row("subtotal_eb", r.subtotal_eb);
  row("raw_media_usd", Interval(r.infrastructure.raw_usd));
  row("infrastructure_usd", r.infrastructure.band_usd);
  row("component_multiplier", r.component_product);
  row("overall_multiplier", r.assumptions.overall_multiplier_band);
  row("catchup_years_50x", Interval(r.catchup_years_50x));
  row("catchup_years_100x", Interval(r.catchup_years_100x));
  return out;
}

inline nlohmann::ordered_json report_json(const CostReport& r) {
  using detail::interval_json;
  nlohmann::ordered_json j;
  const auto& a = r.assumptions;
  j["assumptions"] = {
      {"signature_multiplier", a.signature_multiplier},
      {"media_price_per_tb", a.media_price_per_tb},
      {"doubling_period_years", a.doubling_period_years},
      {"overall_multiplier_band", interval_json(a.overall_multiplier_band)},
      {"overheads",
       {{"usable", a.overheads.usable},
        {"redundancy", a.overheads.redundancy},
        {"system", interval_json(a.overheads.system)},
        {"deployment", a.overheads.deployment},
        {"lifecycle", a.overheads.lifecycle}}},
  };
  auto& rows = j["networks"] = nlohmann::ordered_json::array();
  for (const auto& s : r.rows) {
    rows.push_back({{"name", s.network},
                    {"node_class", std::string(to_string(s.node_class))},
                    {"node_count", interval_json(s.node_count)},
                    {"ten_year_growth_tb", interval_json(s.ten_year_growth_tb)},
                    {"per_node_tb", s.per_node_tb},
                    {"per_node_tb_range", interval_json(s.per_node_tb_range)},
                    {"total_eb", interval_json(s.total_eb)},
                    {"total_eb_mid", s.total_eb.mid()},
                    {"total_eb_full_range", interval_json(s.total_eb_full_range)}});
  }
  j["subtotal_eb"] = interval_json(r.subtotal_eb);
  j["subtotal_eb_mid"] = r.subtotal_eb.mid();
  j["layer2"] = r.layer2;
  j["raw_media_usd"] = r.infrastructure.raw_usd;
  j["infrastructure_usd"] = interval_json(r.infrastructure.band_usd);
  j["component_multiplier"] = interval_json(r.component_product);
  j["catchup_years"] = {{"50x", r.catchup_years_50x}, {"100x", r.catchup_years_100x}};
  return j;
}

/// Aligned plain-text rendering of the full report.
inline std::string report_text(const CostReport& r) {
  std::string out;
  out += fmt::format("{:<22} {:>12} {:>14} {:>22}\n", "Network", "10y growth",
                     "Per node", "Additional total");
  out += std::string(73, '-') + "\n";
  for (const auto& s : r.rows) {
    const std::string total =
        s.total_eb.lo == s.total_eb.hi
            ? fmt::format("{} EB", num(s.total_eb.lo))
            : fmt::format("{}-{} EB", num(s.total_eb.lo), num(s.total_eb.hi));
    out += fmt::format("{:<22} {:>12} {:>14} {:>22}\n", s.network,
                       num(s.ten_year_growth_tb.mid()) + " TB",
                       num(s.per_node_tb) + " TB", total);
  }
  out += fmt::format("{:<22} {:>12} {:>14} {:>22}\n", "Layer-2", "-", "-", r.layer2);
  out += std::string(73, '-') + "\n";
  out += fmt::format("{:<22} {:>12} {:>14} {:>22}\n", "Subtotal", "-", "-",
                     fmt::format("{}-{} EB (mid {})", num(r.subtotal_eb.lo),
                                 num(r.subtotal_eb.hi), num(r.subtotal_eb.mid())));
  out += "\n";
  const auto& a = r.assumptions;
  out += fmt::format("Signature multiplier        {}x\n", num(a.signature_multiplier));
  out += fmt::format("Media price                 ${}/TB\n", num(a.media_price_per_tb));
  out += fmt::format("Raw media cost              ${:.3f}B\n", r.infrastructure.raw_usd / 1e9);
  out += fmt::format("Overall multiplier          {}-{}x (components multiply to {}-{}x)\n",
                     num(a.overall_multiplier_band.lo), num(a.overall_multiplier_band.hi),
                     num(r.component_product.lo), num(r.component_product.hi));
  out += fmt::format("Infrastructure cost         {}-{} (${:.2f}B-${:.2f}B)\n",
                     billions(r.infrastructure.band_usd.lo),
                     billions(r.infrastructure.band_usd.hi),
                     r.infrastructure.band_usd.lo / 1e9, r.infrastructure.band_usd.hi / 1e9);
  out += fmt::format("Hardware catch-up           {:.2f} years at 50x, {:.2f} years at 100x\n",
                     r.catchup_years_50x, r.catchup_years_100x);
  return out;
}

}  // namespace crsig::cost
