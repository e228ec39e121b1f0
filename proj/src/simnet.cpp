#include "treesync/simnet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace treesync {

using Clock = std::chrono::steady_clock;

std::string reorderModelName(ReorderModel model) {
    switch (model) {
        case ReorderModel::FifoPerLink: return "fifo-per-link";
        case ReorderModel::UniformShuffle: return "uniform-shuffle";
        case ReorderModel::BoundedDelay: return "bounded-delay";
    }
    return "?";
}

std::optional<ReorderModel> reorderModelFromName(std::string_view name) {
    if (name == "fifo-per-link") return ReorderModel::FifoPerLink;
    if (name == "uniform-shuffle") return ReorderModel::UniformShuffle;
    if (name == "bounded-delay") return ReorderModel::BoundedDelay;
    return std::nullopt;
}

void ScenarioConfig::validate() const {
    if (nSites < 2) throw std::invalid_argument("scenario: at least two sites required");
    if (mix.add < 0 || mix.del < 0 || mix.chlab < 0 ||
        std::abs(mix.add + mix.del + mix.chlab - 1.0) > 1e-9)
        throw std::invalid_argument("scenario: op mix must be non-negative and sum to 1");
}

std::uint64_t Simulation::Portable64::below(std::uint64_t bound) {
    // fixed-point scaling; bit-identical wherever mt19937_64 is
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
}

double Simulation::Portable64::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

Simulation::Simulation(ScenarioConfig cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    const std::uint32_t n = cfg_.nSites;
    engines_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) engines_.emplace_back(i + 1);
    live_.resize(n);
    livePos_.resize(n);
    peakWaiting_.assign(n, 0);
    pendingPerDst_.assign(n, 0);
    shuffleQ_.resize(n);
    fifoQ_.assign(n, std::vector<std::deque<std::uint32_t>>(n));
    boundedQ_.resize(n);

    for (std::uint32_t i = 0; i < n; ++i) {
        engines_[i].setApplyListener([this, i](const Request& r, const ApplyEffect& effect) {
            auto& ids = live_[i];
            auto& pos = livePos_[i];
            if (const auto* add = std::get_if<AddEdge>(&r.op)) {
                if (effect.applied) {
                    pos.emplace(add->edge, ids.size());
                    ids.push_back(add->edge);
                }
            } else if (std::holds_alternative<DeleteSubtree>(r.op)) {
                for (const Id& gone : effect.removed) {
                    auto it = pos.find(gone);
                    if (it == pos.end()) continue;
                    const std::size_t slot = it->second;
                    pos.erase(it);
                    if (slot + 1 != ids.size()) {
                        ids[slot] = ids.back();
                        pos[ids[slot]] = slot;
                    }
                    ids.pop_back();
                }
            }
        });
    }
}

EditIntent Simulation::pickIntent(std::uint32_t siteIdx) {
    const auto& ids = live_[siteIdx];
    const double u = rng_.unit();
    int kind = u < cfg_.mix.add ? 0 : (u < cfg_.mix.add + cfg_.mix.del ? 1 : 2);
    if (kind != 0 && ids.empty()) kind = 0; // nothing to delete or relabel yet

    if (kind == 0) {
        const std::uint64_t pick = rng_.below(ids.size() + 1);
        const Id parent = pick == 0 ? Id::root() : ids[pick - 1];
        const std::size_t fanout = engines_[siteIdx].tree().childCount(parent);
        return AddIntent{parent, static_cast<std::size_t>(rng_.below(fanout + 1))};
    }
    const Id target = ids[rng_.below(ids.size())];
    if (kind == 1) return DeleteIntent{target};
    return RelabelIntent{target, "t" + std::to_string(log_.size())};
}

void Simulation::broadcast(std::uint32_t fromIdx, std::uint32_t gseq) {
    for (std::uint32_t dst = 0; dst < cfg_.nSites; ++dst) {
        if (dst == fromIdx) continue;
        switch (cfg_.reorder) {
            case ReorderModel::UniformShuffle:
                shuffleQ_[dst].push(RankedMsg{rng_.next(), enqueueSeq_, gseq});
                break;
            case ReorderModel::FifoPerLink:
                fifoQ_[dst][fromIdx].push_back(gseq);
                break;
            case ReorderModel::BoundedDelay:
                boundedQ_[dst].emplace(enqueueSeq_, gseq);
                break;
        }
        ++enqueueSeq_;
        ++pendingPerDst_[dst];
        ++pendingTotal_;
    }
}

void Simulation::trackPeaks(std::uint32_t siteIdx) {
    const auto& eng = engines_[siteIdx];
    peakWaiting_[siteIdx] = std::max(peakWaiting_[siteIdx], eng.waitingCount());
    peakEdges_ = std::max<std::uint64_t>(peakEdges_, eng.tree().edgeCount());
}

void Simulation::generateStep() {
    const auto siteIdx = static_cast<std::uint32_t>(rng_.below(cfg_.nSites));
    const EditIntent intent = pickIntent(siteIdx);

    const auto t0 = Clock::now();
    Request r = engines_[siteIdx].generate(intent);
    const auto t1 = Clock::now();
    const auto ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());

    const auto gseq = static_cast<std::uint32_t>(log_.size());
    gseqOf_.emplace(std::make_pair(r.origin, r.count), gseq);
    log_.push_back(std::move(r));
    perOpNanos_.push_back(ns);
    totalEngineNanos_ += ns;
    ++generated_;
    broadcast(siteIdx, gseq);
    trackPeaks(siteIdx);
}

void Simulation::deliverStep() {
    // pick a destination with pending traffic, uniformly
    std::vector<std::uint32_t> busy;
    busy.reserve(cfg_.nSites);
    for (std::uint32_t i = 0; i < cfg_.nSites; ++i)
        if (pendingPerDst_[i] > 0) busy.push_back(i);
    const std::uint32_t dst = busy[rng_.below(busy.size())];

    std::uint32_t gseq = 0;
    switch (cfg_.reorder) {
        case ReorderModel::UniformShuffle: {
            gseq = shuffleQ_[dst].top().gseq;
            shuffleQ_[dst].pop();
            break;
        }
        case ReorderModel::FifoPerLink: {
            std::vector<std::uint32_t> lanes;
            for (std::uint32_t src = 0; src < cfg_.nSites; ++src)
                if (!fifoQ_[dst][src].empty()) lanes.push_back(src);
            auto& lane = fifoQ_[dst][lanes[rng_.below(lanes.size())]];
            gseq = lane.front();
            lane.pop_front();
            break;
        }
        case ReorderModel::BoundedDelay: {
            auto& q = boundedQ_[dst];
            const std::uint64_t window =
                std::min<std::uint64_t>(q.size(), cfg_.delayBound + 1);
            auto it = q.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(rng_.below(window)));
            gseq = it->second;
            q.erase(it);
            break;
        }
    }
    --pendingPerDst_[dst];
    --pendingTotal_;

    const Request& r = log_[gseq];
    const auto t0 = Clock::now();
    engines_[dst].receive(r);
    const auto t1 = Clock::now();
    const auto ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    perOpNanos_[gseq] += ns;
    totalEngineNanos_ += ns;
    trackPeaks(dst);
}

void Simulation::drain() {
    while (pendingTotal_ > 0) deliverStep();
}

void Simulation::run() {
    // Each generation fans out nSites-1 messages while a delivery consumes
    // one, so an even coin would let the in-flight backlog grow without
    // bound. Weighting generation by nSites/(nSites + pending) keeps the
    // backlog hovering around its balance point instead.
    const auto w0 = Clock::now();
    while (generated_ < cfg_.nOps || pendingTotal_ > 0) {
        const bool canGen = generated_ < cfg_.nOps;
        const double genWeight =
            static_cast<double>(cfg_.nSites) /
            static_cast<double>(cfg_.nSites + pendingTotal_);
        if (canGen && (pendingTotal_ == 0 || rng_.unit() < genWeight)) generateStep();
        else deliverStep();
    }
    wallSeconds_ += std::chrono::duration<double>(Clock::now() - w0).count();
}

void Simulation::deleteAllEdges() {
    const auto w0 = Clock::now();
    for (const Id& victim : engines_[0].tree().childIds(Id::root())) {
        const auto t0 = Clock::now();
        Request r = engines_[0].generate(DeleteIntent{victim});
        const auto t1 = Clock::now();
        const auto ns = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        const auto gseq = static_cast<std::uint32_t>(log_.size());
        gseqOf_.emplace(std::make_pair(r.origin, r.count), gseq);
        log_.push_back(std::move(r));
        perOpNanos_.push_back(ns);
        totalEngineNanos_ += ns;
        broadcast(0, gseq);
    }
    drain();
    wallSeconds_ += std::chrono::duration<double>(Clock::now() - w0).count();
}

RunReport Simulation::report() const {
    RunReport rep;
    rep.cfg = cfg_;
    rep.converged = pendingTotal_ == 0 && checkConvergence(engines_);
    rep.digests.reserve(engines_.size());
    for (const auto& e : engines_) rep.digests.push_back(e.tree().canonicalDigest());
    rep.finalEdgeCount = engines_[0].tree().edgeCount();
    rep.perOpNanos = perOpNanos_;
    rep.peakWaiting = peakWaiting_;
    rep.peakEdges = peakEdges_;
    rep.totalEngineNanos = totalEngineNanos_;
    rep.wallSeconds = wallSeconds_;
    rep.requestLog = log_;
    return rep;
}

RunReport runScenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    sim.run();
    return sim.report();
}

bool checkConvergence(const std::vector<SiteEngine>& engines) {
    if (engines.empty()) return true;
    const std::string digest = engines.front().tree().canonicalDigest();
    for (const auto& e : engines)
        if (e.waitingCount() != 0 || e.tree().canonicalDigest() != digest) return false;
    return true;
}

namespace {

BenchRow rowFromReport(const RunReport& rep, std::uint64_t window) {
    BenchRow row;
    row.cfg = rep.cfg;
    row.converged = rep.converged;
    row.meanNsPerOp = rep.cfg.nOps == 0
                          ? 0.0
                          : static_cast<double>(rep.totalEngineNanos) /
                                static_cast<double>(rep.cfg.nOps);
    if (window > 0 && !rep.perOpNanos.empty()) {
        const std::uint64_t w = std::min<std::uint64_t>(window, rep.cfg.nOps);
        std::uint64_t sum = 0;
        for (std::uint64_t i = rep.cfg.nOps - w; i < rep.cfg.nOps; ++i)
            sum += rep.perOpNanos[i];
        row.windowMeanNsPerOp = static_cast<double>(sum) / static_cast<double>(w);
    }
    row.peakEdges = rep.peakEdges;
    row.peakWaiting = *std::max_element(rep.peakWaiting.begin(), rep.peakWaiting.end());
    row.finalEdgeCount = rep.finalEdgeCount;
    row.totalEngineNanos = rep.totalEngineNanos;
    return row;
}

std::string formatDouble(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::vector<BenchRow> benchUsers(std::uint64_t nOps, const std::vector<std::uint32_t>& users,
                                 std::uint64_t seed) {
    std::vector<BenchRow> rows;
    rows.reserve(users.size());
    for (std::uint32_t u : users) {
        ScenarioConfig cfg;
        cfg.nSites = u;
        cfg.nOps = nOps;
        cfg.seed = seed;
        rows.push_back(rowFromReport(runScenario(cfg), 0));
    }
    return rows;
}

std::vector<BenchRow> benchOps(std::uint64_t window, const std::vector<std::uint64_t>& totals,
                               std::uint32_t users, std::uint64_t seed) {
    std::vector<BenchRow> rows;
    rows.reserve(totals.size());
    for (std::uint64_t total : totals) {
        ScenarioConfig cfg;
        cfg.nSites = users;
        cfg.nOps = total;
        cfg.seed = seed;
        rows.push_back(rowFromReport(runScenario(cfg), window));
    }
    return rows;
}

std::string csvHeader(bool withWindow) {
    std::string h = "sites,ops,seed,mix_add,mix_del,mix_chlab,reorder,delay_bound,"
                    "converged,mean_ns_per_op,peak_edges,peak_waiting";
    if (withWindow) h += ",window_mean_ns";
    return h + "\n";
}

std::string csvRow(const BenchRow& row, bool withWindow) {
    const auto& c = row.cfg;
    std::string s = std::to_string(c.nSites) + "," + std::to_string(c.nOps) + "," +
                    std::to_string(c.seed) + "," + formatDouble(c.mix.add) + "," +
                    formatDouble(c.mix.del) + "," + formatDouble(c.mix.chlab) + "," +
                    reorderModelName(c.reorder) + "," + std::to_string(c.delayBound) + "," +
                    (row.converged ? "1" : "0") + "," + formatDouble(row.meanNsPerOp) + "," +
                    std::to_string(row.peakEdges) + "," + std::to_string(row.peakWaiting);
    if (withWindow) s += "," + formatDouble(row.windowMeanNsPerOp);
    return s + "\n";
}

std::string reportCsv(const RunReport& report) {
    BenchRow row = rowFromReport(report, 0);
    std::string out = "sites,ops,seed,mix_add,mix_del,mix_chlab,reorder,delay_bound,"
                      "converged,mean_ns_per_op,peak_edges,peak_waiting,final_edges,digest\n";
    std::string r = csvRow(row, false);
    r.pop_back(); // newline
    out += r + "," + std::to_string(report.finalEdgeCount) + "," +
           (report.digests.empty() ? "" : report.digests.front()) + "\n";
    return out;
}

std::string reportJson(const RunReport& report) {
    nlohmann::ordered_json j;
    j["config"] = {{"sites", report.cfg.nSites},
                   {"ops", report.cfg.nOps},
                   {"seed", report.cfg.seed},
                   {"mix", {{"add", report.cfg.mix.add},
                            {"del", report.cfg.mix.del},
                            {"chlab", report.cfg.mix.chlab}}},
                   {"reorder", reorderModelName(report.cfg.reorder)},
                   {"delay_bound", report.cfg.delayBound}};
    j["converged"] = report.converged;
    j["digests"] = report.digests;
    j["final_edges"] = report.finalEdgeCount;
    j["peak_edges"] = report.peakEdges;
    j["peak_waiting"] = report.peakWaiting;
    j["total_engine_ns"] = report.totalEngineNanos;
    j["wall_seconds"] = report.wallSeconds;
    return j.dump(2) + "\n";
}

} // namespace treesync
