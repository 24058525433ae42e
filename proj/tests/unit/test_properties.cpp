#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "../oracles/oracles.hpp"
#include "helpers.hpp"
#include "procaware/abstraction.hpp"
#include "procaware/mining.hpp"
#include "procaware/xes.hpp"

using namespace procaware;

namespace {

constexpr int kCases = 250;

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random dense fixture together with a grouping and ranks that cover every sensor.
struct Fixture {
    oracle::Grid grid;
    std::vector<oracle::Group> groups;
    oracle::Ranks ranks;

    [[nodiscard]] std::vector<DiscreteStream> streams() const {
        std::vector<DiscreteStream> out;
        for (std::size_t s = 0; s < grid.sensors.size(); ++s) out.push_back(testing::dense_stream(grid.sensors[s], grid.codes[s]));
        return out;
    }

    [[nodiscard]] SensorGrouping grouping() const {
        std::vector<SensorGroup> gs;
        for (auto const& g : groups) {
            SensorGroup sg{{g.gid, g.gid}, {}};
            for (auto const& m : g.members) sg.members.emplace_back(m);
            gs.push_back(std::move(sg));
        }
        return SensorGrouping(std::move(gs));
    }

    [[nodiscard]] SensorRanking ranking(int scale = 1) const {
        SensorRanking r;
        for (auto const& [key, rank] : ranks) r.set(key.first, SensorId(key.second), rank * scale);
        return r;
    }
};

Fixture random_fixture(Rng& rng, int max_ticks, int max_sensors) {
    Fixture f;
    int const sensors = uniform(rng, 1, max_sensors);
    int const ticks = uniform(rng, 2, max_ticks);
    for (int s = 0; s < sensors; ++s) {
        f.grid.sensors.push_back(std::string(1, static_cast<char>('A' + s)));
        std::vector<int> codes{uniform(rng, 0, 2)};
        for (int t = 1; t < ticks; ++t) codes.push_back(uniform(rng, 0, 2) == 0 ? uniform(rng, 0, 2) : codes.back());
        f.grid.codes.push_back(std::move(codes));
    }
    int const group_count = uniform(rng, 1, 3);
    for (int g = 0; g < group_count; ++g) {
        oracle::Group grp{std::string(1, static_cast<char>('G' + g)), {}};
        for (auto const& s : f.grid.sensors) {
            if (uniform(rng, 0, 1)) grp.members.insert(s);
        }
        if (grp.members.empty()) grp.members.insert(f.grid.sensors[static_cast<std::size_t>(uniform(rng, 0, sensors - 1))]);
        f.groups.push_back(std::move(grp));
    }
    for (auto const& s : f.grid.sensors) {
        bool covered = std::any_of(f.groups.begin(), f.groups.end(), [&](auto const& g) { return g.members.count(s) > 0; });
        if (!covered) f.groups[static_cast<std::size_t>(uniform(rng, 0, group_count - 1))].members.insert(s);
    }
    for (auto const& g : f.groups) {
        for (auto const& m : g.members) f.ranks[{g.gid, m}] = uniform(rng, 1, 4);
    }
    return f;
}

std::set<Timestamp> times_at_depth(TopologyResult const& topo, JointChangeTable const& jc, SensorGrouping const& g,
                                   std::size_t depth) {
    AbstractionConfig cfg;
    cfg.depth = depth;
    auto events = abstract_events(topo.rows, jc, g, cfg);
    std::set<Timestamp> out;
    for (auto const& e : events) out.insert(e.timestamp);
    return out;
}

std::multiset<std::pair<std::string, Timestamp>> participations(JointChangeTable const& jc) {
    std::multiset<std::pair<std::string, Timestamp>> out;
    for (std::size_t e = 0; e < jc.size(); ++e) {
        for (auto const& c : jc.changes(e)) out.insert({jc.sensors()[c.sensor].str(), c.timestamp});
    }
    return out;
}

}  // namespace

TEST_CASE("topology agrees with the brute-force recomputation") {
    Rng rng(101);
    int nonempty = 0;
    for (int i = 0; i < kCases; ++i) {
        auto f = random_fixture(rng, 8, 5);
        auto want = oracle::topology(f.grid, f.groups, f.ranks);
        auto streams = f.streams();
        auto topo = compute_topology(detect_joint_changes(streams, 0), f.grouping(), f.ranking());
        REQUIRE(topo.rows.size() == want.size());
        nonempty += topo.rows.empty() ? 0 : 1;
        for (auto const& row : topo.rows) {
            auto const& w = want.at(row.sensor.str());
            CHECK(row.wsr_sum.num() == w.sum.num);
            CHECK(row.wsr_sum.den() == w.sum.den);
            CHECK(row.occurrence_count == w.count);
            CHECK(std::vector<long long>(row.timestamps.begin(), row.timestamps.end()) == w.timestamps);
            CHECK(row.importance_exact() * Rational(static_cast<std::int64_t>(row.occurrence_count)) == row.wsr_sum);
        }
        for (auto const& rec : topo.trace.records) {
            for (auto const& term : rec.terms) {
                CHECK(term.weighted == Rational(static_cast<std::int64_t>(rec.alpha)) / term.sensor_rank);
            }
        }
    }
    CHECK(nonempty > kCases / 2);
}

TEST_CASE("topology ignores stream order") {
    Rng rng(102);
    for (int i = 0; i < kCases; ++i) {
        auto f = random_fixture(rng, 8, 5);
        auto streams = f.streams();
        auto a = compute_topology(detect_joint_changes(streams, 0), f.grouping(), f.ranking());
        std::shuffle(streams.begin(), streams.end(), rng);
        auto b = compute_topology(detect_joint_changes(streams, 0), f.grouping(), f.ranking());
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t r = 0; r < a.rows.size(); ++r) {
            CHECK(a.rows[r].sensor == b.rows[r].sensor);
            CHECK(a.rows[r].wsr_sum == b.rows[r].wsr_sum);
        }
    }
}

TEST_CASE("depth monotonicity") {
    Rng rng(103);
    for (int i = 0; i < kCases; ++i) {
        auto f = random_fixture(rng, 12, 5);
        auto streams = f.streams();
        auto grouping = f.grouping();
        auto jc = detect_joint_changes(streams, uniform(rng, 0, 2));
        auto topo = compute_topology(jc, grouping, f.ranking());
        std::set<Timestamp> previous;
        for (std::size_t k = 1; k <= topo.rows.size(); ++k) {
            auto current = times_at_depth(topo, jc, grouping, k);
            CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
            previous = std::move(current);
        }
        std::set<Timestamp> all;
        for (std::size_t e = 0; e < jc.size(); ++e) all.insert(jc.timestamp(e));
        CHECK(previous == all);
    }
}

TEST_CASE("window monotonicity") {
    Rng rng(104);
    for (int i = 0; i < kCases; ++i) {
        auto f = random_fixture(rng, 30, 5);
        auto streams = f.streams();
        std::vector<std::pair<long long, std::string>> changes;
        for (auto const& d : streams) {
            for (auto t : change_timestamps(d)) changes.emplace_back(t, d.sensor.str());
        }
        auto base = participations(detect_joint_changes(streams, 0));
        std::size_t previous = std::numeric_limits<std::size_t>::max();
        for (Timestamp w = 0; w <= 5; ++w) {
            auto jc = detect_joint_changes(streams, w);
            CHECK(jc.size() <= previous);
            previous = jc.size();
            CHECK(participations(jc) == base);

            auto want = oracle::cluster(changes, w);
            REQUIRE(jc.size() == want.size());
            std::size_t e = 0;
            for (auto const& [anchor, members] : want) {
                CHECK(jc.timestamp(e) == anchor);
                std::multiset<std::pair<std::string, long long>> got;
                for (auto const& c : jc.changes(e)) got.insert({jc.sensors()[c.sensor].str(), c.timestamp});
                CHECK(got == members);
                ++e;
            }
        }
    }
}

TEST_CASE("scaling every rank keeps the topology order") {
    Rng rng(105);
    for (int i = 0; i < kCases; ++i) {
        auto f = random_fixture(rng, 8, 5);
        auto streams = f.streams();
        auto jc = detect_joint_changes(streams, 0);
        int const c = uniform(rng, 2, 9);
        auto a = compute_topology(jc, f.grouping(), f.ranking());
        auto b = compute_topology(jc, f.grouping(), f.ranking(c));
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t r = 0; r < a.rows.size(); ++r) {
            CHECK(a.rows[r].sensor == b.rows[r].sensor);
            CHECK(b.rows[r].importance_exact() * Rational(c) == a.rows[r].importance_exact());
        }
    }
}

TEST_CASE("xes round-trip identity") {
    Rng rng(106);
    std::vector<std::string> const words{"move part", "grab & lift", "<oven>", "say \"hi\"", "it's", "case/1",
                                         "Ü-Förderband", "  padded  ", "x"};
    std::uniform_real_distribution<double> real(-1e6, 1e6);
    for (int i = 0; i < kCases; ++i) {
        std::vector<EnrichedLogRow> log;
        int const rows = uniform(rng, 0, 12);
        int const cases = uniform(rng, 1, 4);
        for (int r = 0; r < rows; ++r) {
            int const n = uniform(rng, 1, 4);
            std::vector<SensorId> sensors;
            std::vector<double> values;
            std::vector<Timestamp> stamps;
            std::vector<PrivacyLevel> privacy;
            for (int k = 0; k < n; ++k) {
                sensors.emplace_back("S" + std::to_string(uniform(rng, 1, 9)));
                int const kind = uniform(rng, 0, 3);
                values.push_back(kind == 0 ? uniform(rng, -5, 1500) : kind == 1 ? real(rng) * 1e-9 : real(rng));
                stamps.push_back(std::uniform_int_distribution<Timestamp>(0, 4'000'000'000'000)(rng));
                privacy.push_back(static_cast<PrivacyLevel>(uniform(rng, 0, 2)));
            }
            log.emplace_back(std::move(sensors), std::move(values), std::move(stamps), std::move(privacy),
                             words[static_cast<std::size_t>(uniform(rng, 0, cases - 1))], "ev-" + std::to_string(r + 1),
                             std::uniform_int_distribution<Timestamp>(0, 4'000'000'000'000)(rng),
                             static_cast<Lifecycle>(uniform(rng, 0, 2)),
                             words[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(words.size()) - 1))]);
        }
        // Export groups rows by case in order of first appearance.
        std::vector<std::string> order;
        for (auto const& row : log) {
            if (std::find(order.begin(), order.end(), row.case_id()) == order.end()) order.push_back(row.case_id());
        }
        std::vector<EnrichedLogRow> expected;
        for (auto const& c : order) {
            for (auto const& row : log) {
                if (row.case_id() == c) expected.push_back(row);
            }
        }
        auto back = parse_xes(export_xes(log));
        CHECK(back == expected);
    }
}

TEST_CASE("dfg edge counts are conserved") {
    Rng rng(107);
    std::vector<std::string> const labels{"a", "b", "c", "d"};
    for (int i = 0; i < kCases; ++i) {
        std::vector<EnrichedLogRow> log;
        int const rows = uniform(rng, 1, 20);
        std::vector<Timestamp> stamps(static_cast<std::size_t>(rows));
        std::iota(stamps.begin(), stamps.end(), 0);
        std::shuffle(stamps.begin(), stamps.end(), rng);
        for (int r = 0; r < rows; ++r) {
            log.push_back(testing::make_row("c" + std::to_string(uniform(rng, 1, 4)), "e" + std::to_string(r),
                                            stamps[static_cast<std::size_t>(r)],
                                            labels[static_cast<std::size_t>(uniform(rng, 0, 3))],
                                            static_cast<Lifecycle>(uniform(rng, 0, 2))));
        }
        std::optional<Lifecycle> filter;
        if (uniform(rng, 0, 1)) filter = static_cast<Lifecycle>(uniform(rng, 0, 2));

        auto g = mine_dfg(log, filter);
        auto traces = build_traces(log, filter);
        std::size_t expected = 0;
        std::size_t events = 0;
        for (auto const& t : traces) {
            expected += t.labels.size() - 1;
            events += t.labels.size();
        }
        CHECK(g.edge_total() == expected);
        std::size_t freq = 0;
        for (auto const& [label, n] : g.activities) freq += n;
        CHECK(freq == events);
        std::size_t starts = 0;
        for (auto const& [label, n] : g.starts) starts += n;
        CHECK(starts == traces.size());
        for (auto const& [edge, n] : g.edges) {
            CHECK(g.activities.count(edge.first) == 1);
            CHECK(g.activities.count(edge.second) == 1);
        }

        // Renaming cases and reordering rows must not matter.
        std::vector<EnrichedLogRow> relabeled;
        for (auto const& row : log) {
            relabeled.emplace_back(row.sensor_ids(), row.sensor_values(), row.sensor_timestamps(), row.sensor_privacy(),
                                   "renamed-" + row.case_id(), row.event_id(), row.event_timestamp(), row.lifecycle(),
                                   row.label());
        }
        std::shuffle(relabeled.begin(), relabeled.end(), rng);
        CHECK(mine_dfg(relabeled, filter) == g);
    }
}

TEST_CASE("sax is invariant under positive affine maps") {
    Rng rng(108);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    std::uniform_real_distribution<double> shift(-1000.0, 1000.0);
    for (int i = 0; i < kCases; ++i) {
        int const alphabet = uniform(rng, 2, 8);
        int const paa = uniform(rng, 1, 10);
        int const n = uniform(rng, std::max(4, paa), 200);
        double const a = scale(rng);
        double const b = shift(rng);
        SensorStream raw{SensorId("X"), {}};
        SensorStream mapped{SensorId("X"), {}};
        std::vector<double> values;
        for (int t = 0; t < n; ++t) {
            double v = normal(rng) * 10.0 + 50.0;
            values.push_back(v);
            raw.readings.push_back({t, v});
            mapped.readings.push_back({t, a * v + b});
        }
        auto x = auto_discretize(raw, {alphabet, paa});
        auto y = auto_discretize(mapped, {alphabet, paa});
        CHECK(x.stream.points == y.stream.points);

        auto want = oracle::sax(values, alphabet, static_cast<std::size_t>(paa));
        REQUIRE(x.stream.points.size() == want.size());
        for (std::size_t k = 0; k < want.size(); ++k) CHECK(x.stream.points[k].code == want[k]);
    }
}
