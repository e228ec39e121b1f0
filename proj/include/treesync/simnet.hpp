#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "treesync/engine.hpp"

namespace treesync {

enum class ReorderModel { FifoPerLink, UniformShuffle, BoundedDelay };

[[nodiscard]] std::string reorderModelName(ReorderModel model);
[[nodiscard]] std::optional<ReorderModel> reorderModelFromName(std::string_view name);

struct OpMix {
    double add = 0.50;
    double del = 0.10;
    double chlab = 0.40;
};

struct ScenarioConfig {
    std::uint32_t nSites = 2;
    std::uint64_t nOps = 0;
    std::uint64_t seed = 0;
    OpMix mix;
    ReorderModel reorder = ReorderModel::UniformShuffle;
    std::uint64_t delayBound = 4; // bounded-delay only

    void validate() const; // throws std::invalid_argument
};

struct RunReport {
    ScenarioConfig cfg;
    bool converged = false;
    std::vector<std::string> digests;      // per site, site 1 first
    std::uint64_t finalEdgeCount = 0;      // root included
    std::vector<std::uint64_t> perOpNanos; // engine time bucketed per minted op
    std::vector<std::size_t> peakWaiting;  // per site
    std::uint64_t peakEdges = 0;           // max live edges seen at any site
    std::uint64_t totalEngineNanos = 0;
    double wallSeconds = 0.0;
    std::vector<Request> requestLog; // generation order, replayable
};

/// Deterministic single-threaded scenario: seeded sites interleave edit
/// generation with message delivery through the chosen reorder model until
/// every queue drains. Time is charged only to SiteEngine calls.
class Simulation {
  public:
    explicit Simulation(ScenarioConfig cfg);

    void run();

    /// Post-quiescence teardown: site 1 deletes every top-level subtree and
    /// the deletions are delivered everywhere.
    void deleteAllEdges();

    [[nodiscard]] const std::vector<SiteEngine>& engines() const { return engines_; }
    [[nodiscard]] RunReport report() const;

  private:
    struct Portable64 {
        std::mt19937_64 gen;
        explicit Portable64(std::uint64_t seed) : gen(seed) {}
        std::uint64_t next() { return gen(); }
        std::uint64_t below(std::uint64_t bound);
        double unit();
    };

    void generateStep();
    void deliverStep();
    void drain();
    void broadcast(std::uint32_t fromIdx, std::uint32_t gseq);
    EditIntent pickIntent(std::uint32_t siteIdx);
    void trackPeaks(std::uint32_t siteIdx);
    std::uint64_t timedGenerate(std::uint32_t siteIdx, const EditIntent& intent);

    ScenarioConfig cfg_;
    Portable64 rng_;
    std::vector<SiteEngine> engines_;
    std::vector<std::vector<Id>> live_; // per site: non-root edges, O(1) pick
    std::vector<std::unordered_map<Id, std::size_t>> livePos_;
    std::vector<Request> log_;
    std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint32_t> gseqOf_;

    struct RankedMsg {
        std::uint64_t rank;
        std::uint64_t seq;
        std::uint32_t gseq;
        bool operator>(const RankedMsg& o) const {
            return std::tie(rank, seq) > std::tie(o.rank, o.seq);
        }
    };
    // one lane per destination (shuffle / bounded), or per link (fifo)
    std::vector<std::priority_queue<RankedMsg, std::vector<RankedMsg>, std::greater<>>> shuffleQ_;
    std::vector<std::vector<std::deque<std::uint32_t>>> fifoQ_; // [dst][src]
    std::vector<std::map<std::uint64_t, std::uint32_t>> boundedQ_; // [dst] seq -> gseq
    std::vector<std::size_t> pendingPerDst_;
    std::uint64_t enqueueSeq_ = 0;
    std::uint64_t pendingTotal_ = 0;

    std::uint64_t generated_ = 0;
    std::vector<std::uint64_t> perOpNanos_;
    std::vector<std::size_t> peakWaiting_;
    std::uint64_t peakEdges_ = 1;
    std::uint64_t totalEngineNanos_ = 0;
    double wallSeconds_ = 0.0;
};

RunReport runScenario(const ScenarioConfig& cfg);

[[nodiscard]] bool checkConvergence(const std::vector<SiteEngine>& engines);

struct BenchRow {
    ScenarioConfig cfg;
    bool converged = false;
    double meanNsPerOp = 0.0;
    double windowMeanNsPerOp = 0.0; // final-window mean (bench-ops sweeps)
    std::uint64_t peakEdges = 0;
    std::size_t peakWaiting = 0;
    std::uint64_t finalEdgeCount = 0;
    std::uint64_t totalEngineNanos = 0;
};

/// Fixed op budget, growing replica count.
std::vector<BenchRow> benchUsers(std::uint64_t nOps, const std::vector<std::uint32_t>& users,
                                 std::uint64_t seed);

/// Fixed replica count, growing total ops; windowMeanNsPerOp covers the
/// final `window` minted ops of each run.
std::vector<BenchRow> benchOps(std::uint64_t window, const std::vector<std::uint64_t>& totals,
                               std::uint32_t users, std::uint64_t seed);

[[nodiscard]] std::string csvHeader(bool withWindow);
[[nodiscard]] std::string csvRow(const BenchRow& row, bool withWindow);
[[nodiscard]] std::string reportCsv(const RunReport& report);
[[nodiscard]] std::string reportJson(const RunReport& report);

} // namespace treesync
