#include <gtest/gtest.h>

#include <random>

#include "crsig/costmodel.hpp"

namespace crsig::cost {
namespace {

const StorageRow& row(const std::vector<StorageRow>& rows, std::string_view name) {
  for (const auto& r : rows) {
    if (r.network == name) return r;
  }
  throw std::runtime_error("missing row");
}

TEST(TxSize, Legacy) {
  static_assert(bitcoin_tx_size(1, 2) == 226);
  EXPECT_EQ(bitcoin_tx_size(2, 2), 374u);
  EXPECT_EQ(bitcoin_tx_size(1, 1), 192u);
  EXPECT_THROW(bitcoin_tx_size(0, 1), DomainError);
  EXPECT_THROW(bitcoin_tx_size(1, 0), DomainError);
}

TEST(TxSize, Segwit) {
  EXPECT_EQ(segwit_weight(100, 100), (SegwitWeight{400, 100}));
  EXPECT_EQ(segwit_weight(100, 200), (SegwitWeight{500, 125}));
  EXPECT_EQ(segwit_weight(0, 0), (SegwitWeight{0, 0}));
  EXPECT_EQ(segwit_weight(100, 101).vbytes, 101u);  // 401 / 4 rounds up
  EXPECT_THROW(segwit_weight(10, 9), DomainError);
}

TEST(Catalog, RepresentativeTxSizes) {
  const auto cat = default_catalog();
  EXPECT_EQ(tx_size_for_scheme(cat, "ECDSA"), 200u);
  EXPECT_EQ(tx_size_for_scheme(cat, "Dilithium"), 3000u);
  EXPECT_EQ(tx_size_for_scheme(cat, "SPHINCS+"), 20000u);
  EXPECT_THROW(tx_size_for_scheme(cat, "Lamport"), ConfigError);
  EXPECT_THROW(tx_size_for_scheme(cat, "RSA"), ConfigError);
}

TEST(Catalog, KeyAndSignatureRanges) {
  const auto cat = default_catalog();
  EXPECT_EQ(find_scheme(cat, "ECDSA").public_key_bytes, (ByteRange{64, 64}));
  EXPECT_EQ(find_scheme(cat, "ECDSA").signature_bytes, (ByteRange{65, 65}));
  EXPECT_EQ(find_scheme(cat, "Dilithium").public_key_bytes, (ByteRange{1000, 2500}));
  EXPECT_EQ(find_scheme(cat, "Dilithium").signature_bytes, (ByteRange{2000, 4500}));
  EXPECT_EQ(find_scheme(cat, "SPHINCS+").public_key_bytes, (ByteRange{32, 32}));
  EXPECT_EQ(find_scheme(cat, "SPHINCS+").signature_bytes, (ByteRange{10000, 30000}));
  EXPECT_EQ(find_scheme(cat, "Lamport").public_key_bytes, (ByteRange{32000, 32000}));
  EXPECT_EQ(find_scheme(cat, "Lamport").signature_bytes, (ByteRange{16000, 16000}));
}

TEST(Projection, NodeStorageBars) {
  const auto fig = default_fig2();
  ASSERT_EQ(fig.size(), 2u);
  EXPECT_EQ(node_storage_projection(fig[0].current_tb, fig[0].multiplier), 60.0);
  EXPECT_EQ(node_storage_projection(fig[1].current_tb, fig[1].multiplier), 800.0);
  EXPECT_EQ(node_storage_projection(7.5, 1.0), 7.5);
  EXPECT_THROW(node_storage_projection(0.0, 2.0), DomainError);
  EXPECT_THROW(node_storage_projection(1.0, 0.5), DomainError);
}

// Oracle: 10 x growth(GB) / 1000 x 50 x nodes / 1e6, computed by hand.
TEST(Aggregate, NetworkRows) {
  const auto rows = aggregate_storage(default_networks(), CostAssumptions{});
  const auto& btc = row(rows, "Bitcoin");
  EXPECT_DOUBLE_EQ(btc.ten_year_growth_tb.mid(), 0.6);
  EXPECT_DOUBLE_EQ(btc.per_node_tb, 30.0);
  EXPECT_NEAR(btc.total_eb.mid(), 2.16, 1e-12);
  const auto& eth = row(rows, "Ethereum (full)");
  EXPECT_DOUBLE_EQ(eth.per_node_tb, 100.0);
  EXPECT_NEAR(eth.total_eb.mid(), 1.2, 1e-12);
  const auto& arc = row(rows, "Ethereum (archive)");
  EXPECT_DOUBLE_EQ(arc.per_node_tb, 1000.0);
  EXPECT_NEAR(arc.total_eb.mid(), 1.0, 1e-12);
  EXPECT_EQ(arc.node_class, NodeClass::kArchive);
  const auto& other = row(rows, "Other UTXO chains");
  EXPECT_NEAR(other.total_eb.lo, 0.063, 1e-12);
  EXPECT_NEAR(other.total_eb.hi, 0.09, 1e-12);
  EXPECT_NEAR(other.total_eb_full_range.lo, 0.0525, 1e-12);
  EXPECT_NEAR(other.total_eb_full_range.hi, 0.105, 1e-12);

  const Interval sub = subtotal_eb(rows);
  EXPECT_NEAR(sub.lo, 4.423, 1e-9);
  EXPECT_NEAR(sub.hi, 4.45, 1e-9);
  EXPECT_NEAR(sub.mid(), 4.4365, 1e-9);
}

TEST(Aggregate, ReachableBitcoinAlternative) {
  const auto rows = aggregate_storage({bitcoin_reachable_profile()}, CostAssumptions{});
  EXPECT_NEAR(rows[0].total_eb.lo, 0.39, 1e-12);
  EXPECT_NEAR(rows[0].total_eb.hi, 0.6, 1e-12);
}

TEST(Infrastructure, Examples) {
  const CostAssumptions a;
  const auto c = infrastructure_cost(4.5, a);
  EXPECT_NEAR(c.raw_usd, 1.35e9, 1e-3);
  EXPECT_NEAR(c.band_usd.lo, 13.5e9, 1e-2);
  EXPECT_NEAR(c.band_usd.hi, 27e9, 1e-2);
  EXPECT_EQ(billions(c.band_usd.lo), "$14B");
  EXPECT_EQ(billions(c.band_usd.hi), "$27B");
  EXPECT_NEAR(infrastructure_cost(0.001, a).raw_usd, 300000.0, 1e-6);
  EXPECT_THROW(infrastructure_cost(0.0, a), DomainError);
}

TEST(Multipliers, ComponentProduct) {
  const Interval p = component_multiplier_product(CostAssumptions{});
  EXPECT_NEAR(p.lo, 11.7, 1e-12);
  EXPECT_NEAR(p.hi, 14.625, 1e-12);
  CostAssumptions ones;
  ones.overheads = {1, 1, Interval(1.0), 1, 1};
  EXPECT_EQ(component_multiplier_product(ones), Interval(1.0));
  // The quoted band brackets the component product.
  const Interval band = CostAssumptions{}.overall_multiplier_band;
  EXPECT_TRUE(band.contains(p.lo) && band.contains(p.hi));
}

TEST(Catchup, Years) {
  EXPECT_NEAR(hardware_catchup_years(50), 11.287712379549449, 1e-12);
  EXPECT_NEAR(hardware_catchup_years(100), 13.287712379549449, 1e-12);
  EXPECT_EQ(hardware_catchup_years(1), 0.0);
  EXPECT_THROW(hardware_catchup_years(0.5), DomainError);
}

TEST(Units, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(1e-6, 1e9);
  for (int i = 0; i < 1000; ++i) {
    const double tb = d(rng);
    ASSERT_NEAR(eb_to_tb(tb_to_eb(tb)), tb, tb * 1e-15);
  }
  EXPECT_EQ(kBytesPerTB, 1e12);
  EXPECT_EQ(kTBPerEB, 1e6);
}

TEST(Monotonicity, RandomPerturbations) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bump(1.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    CostModel lo;
    lo.assumptions.signature_multiplier = bump(rng) * 20;
    lo.assumptions.media_price_per_tb = bump(rng) * 100;
    for (auto& n : lo.networks) n.node_count = n.node_count * bump(rng);
    CostModel hi = lo;
    switch (i % 3) {
      case 0: hi.assumptions.signature_multiplier *= bump(rng); break;
      case 1: hi.assumptions.media_price_per_tb *= bump(rng); break;
      default:
        for (auto& n : hi.networks) n.node_count = n.node_count * bump(rng);
    }
    const CostReport a = build_report(lo);
    const CostReport b = build_report(hi);
    ASSERT_LE(a.subtotal_eb.lo, b.subtotal_eb.lo);
    ASSERT_LE(a.subtotal_eb.hi, b.subtotal_eb.hi);
    ASSERT_LE(a.infrastructure.raw_usd, b.infrastructure.raw_usd);
    ASSERT_LE(a.infrastructure.band_usd.hi, b.infrastructure.band_usd.hi);
    const double m = bump(rng);
    ASSERT_LE(hardware_catchup_years(m), hardware_catchup_years(m * bump(rng)));
  }
}

TEST(Config, JsonOverridesAndDefaults) {
  const CostModel m = parse_cost_model(R"({
    "assumptions": {"media_price_per_tb": 150, "overheads": {"system": [2.0, 3.0]}},
    "networks": [{"name": "Test", "node_count": 1000, "annual_growth_gb": [10, 30]}]
  })");
  EXPECT_EQ(m.assumptions.media_price_per_tb, 150.0);
  EXPECT_EQ(m.assumptions.signature_multiplier, 50.0);
  EXPECT_EQ(m.assumptions.overheads.system, (Interval{2.0, 3.0}));
  ASSERT_EQ(m.networks.size(), 1u);
  EXPECT_EQ(m.networks[0].node_class, NodeClass::kFull);
  EXPECT_EQ(m.catalog, default_catalog());
  const auto rows = aggregate_storage(m.networks, m.assumptions);
  EXPECT_DOUBLE_EQ(rows[0].per_node_tb, 10.0);

  EXPECT_THROW(parse_cost_model("{"), ConfigError);
  EXPECT_THROW(parse_cost_model(R"({"networks": [{"name": "x"}]})"), ConfigError);
  EXPECT_THROW(parse_cost_model(R"({"assumptions": {"signature_multiplier": 0.5}})"),
               ConfigError);
  EXPECT_THROW(parse_cost_model(
                   R"({"catalog": [{"name": "x", "public_key_bytes": [5, 1], "signature_bytes": 1}]})"),
               ConfigError);
}

TEST(Report, DefaultsAndFormats) {
  const CostModel m;
  const CostReport r = build_report(m);
  EXPECT_EQ(r.layer2, "unquantified");
  EXPECT_NEAR(r.infrastructure.raw_usd, 4.4365e6 * 300, 1e-3);
  EXPECT_EQ(fig1_csv(m), "scheme,tx_bytes\nECDSA,200\nDilithium,3000\nSPHINCS+,20000\n");
  EXPECT_EQ(fig2_csv(m),
            "bar,storage_tb\nFull (Current),1.2\nFull (PQ),60\n"
            "Archive (Current),15\nArchive (PQ),800\n");
  const std::string t2 = table2_csv(m);
  EXPECT_NE(t2.find("Bitcoin,0.6,30,2.16,2.16,2.16\n"), std::string::npos);
  EXPECT_NE(t2.find("Other UTXO chains,0.6,30,0.063,0.09,0.0765\n"), std::string::npos);
  EXPECT_NE(t2.find("Subtotal,,,4.423,4.45,4.4365\n"), std::string::npos);
  const auto j = report_json(r);
  EXPECT_EQ(j["networks"].size(), 4u);
  EXPECT_EQ(j["layer2"], "unquantified");
  EXPECT_NE(report_text(r).find("Layer-2"), std::string::npos);
  EXPECT_EQ(report_csv(r).rfind("item,low,high,mid\n", 0), 0u);
}

}  // namespace
}  // namespace crsig::cost
