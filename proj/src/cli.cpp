#include "treesync/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treesync/simnet.hpp"
#include "treesync/wire.hpp"
#include "treesync/xml.hpp"

namespace treesync {

namespace {

constexpr int kOk = 0;
constexpr int kDiverged = 1;
constexpr int kUsage = 2;

std::optional<std::string> readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool writeFile(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    return static_cast<bool>(out);
}

bool parseMix(const std::string& text, OpMix& mix) {
    double a = 0;
    double d = 0;
    double c = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &a, &d, &c, &tail) != 3) return false;
    mix = OpMix{a, d, c};
    return true;
}

/// Replays a log on fresh consumer replicas whose site ids sit above every
/// origin in the log. Returns the replicas; empty on a log that does not
/// fully execute.
std::vector<SiteEngine> replayLog(const std::vector<Request>& log, std::uint32_t replicas) {
    std::uint32_t maxOrigin = 0;
    for (const Request& r : log) maxOrigin = std::max(maxOrigin, r.origin);

    std::vector<SiteEngine> engines;
    engines.reserve(replicas);
    for (std::uint32_t i = 0; i < replicas; ++i) engines.emplace_back(maxOrigin + 1 + i);

    for (auto& engine : engines)
        for (const Request& r : log) engine.receive(r);
    for (const auto& engine : engines)
        if (engine.waitingCount() != 0) return {};
    return engines;
}

int runSimulate(const ScenarioConfig& cfg, const std::string& csvPath,
                const std::string& jsonPath, const std::string& logPath) {
    const RunReport report = runScenario(cfg);

    if (!csvPath.empty() && !writeFile(csvPath, reportCsv(report))) {
        std::cerr << "cannot write " << csvPath << "\n";
        return kUsage;
    }
    if (!jsonPath.empty() && !writeFile(jsonPath, reportJson(report))) {
        std::cerr << "cannot write " << jsonPath << "\n";
        return kUsage;
    }
    if (!logPath.empty() && !writeFile(logPath, encodeRequestLog(report.requestLog))) {
        std::cerr << "cannot write " << logPath << "\n";
        return kUsage;
    }

    if (!report.converged) {
        std::cout << "diverged sites=" << cfg.nSites << " ops=" << cfg.nOps
                  << " seed=" << cfg.seed << "\n";
        for (std::size_t i = 0; i < report.digests.size(); ++i)
            std::cout << "site " << i + 1 << " digest=" << report.digests[i] << "\n";
        if (logPath.empty())
            std::cout << "request log:\n" << encodeRequestLog(report.requestLog);
        return kDiverged;
    }
    std::cout << "converged sites=" << cfg.nSites << " ops=" << cfg.nOps
              << " seed=" << cfg.seed << " digest=" << report.digests.front()
              << " edges=" << report.finalEdgeCount << "\n";
    return kOk;
}

int runCheck(const std::vector<std::string>& paths) {
    std::vector<std::string> contents;
    for (const auto& path : paths) {
        auto text = readFile(path);
        if (!text) {
            std::cerr << "cannot read " << path << "\n";
            return kUsage;
        }
        contents.push_back(std::move(*text));
    }
    for (const auto& c : contents)
        if (c != contents.front()) {
            std::cout << "diverged\n";
            return kDiverged;
        }
    std::cout << "converged\n";
    return kOk;
}

int runReplay(const std::string& logPath, std::uint32_t replicas) {
    auto text = readFile(logPath);
    if (!text) {
        std::cerr << "cannot read " << logPath << "\n";
        return kUsage;
    }
    std::vector<Request> log;
    try {
        log = decodeRequestLog(*text);
    } catch (const WireError& e) {
        std::cerr << logPath << ": " << e.what() << "\n";
        return kUsage;
    }

    const auto engines = replayLog(log, replicas);
    if (engines.empty()) {
        std::cout << "replay stalled: waiting requests remain\n";
        return kDiverged;
    }
    const std::string digest = engines.front().tree().canonicalDigest();
    for (const auto& engine : engines)
        if (engine.tree().canonicalDigest() != digest) {
            std::cout << "diverged\n";
            return kDiverged;
        }
    std::cout << "digest=" << digest << " edges=" << engines.front().tree().edgeCount()
              << "\n";
    return kOk;
}

int runImport(const std::string& inPath, const std::string& outPath, std::uint32_t site) {
    auto text = readFile(inPath);
    if (!text) {
        std::cerr << "cannot read " << inPath << "\n";
        return kUsage;
    }
    ImportResult result;
    try {
        result = importXml(*text, site);
    } catch (const XmlError& e) {
        std::cerr << inPath << ": " << e.what() << "\n";
        return kUsage;
    }
    if (!outPath.empty() && !writeFile(outPath, encodeRequestLog(result.requests))) {
        std::cerr << "cannot write " << outPath << "\n";
        return kUsage;
    }
    std::cout << "imported edges=" << result.tree.edgeCount()
              << " requests=" << result.requests.size()
              << " digest=" << result.tree.canonicalDigest() << "\n";
    return kOk;
}

int runExport(const std::string& inPath, const std::string& outPath,
              const std::string& mode) {
    auto text = readFile(inPath);
    if (!text) {
        std::cerr << "cannot read " << inPath << "\n";
        return kUsage;
    }
    std::vector<Request> log;
    try {
        log = decodeRequestLog(*text);
    } catch (const WireError& e) {
        std::cerr << inPath << ": " << e.what() << "\n";
        return kUsage;
    }
    const auto engines = replayLog(log, 1);
    if (engines.empty()) {
        std::cout << "replay stalled: waiting requests remain\n";
        return kDiverged;
    }
    const Tree& tree = engines.front().tree();
    const std::string out = mode == "canonical" ? tree.canonicalSerialize() : exportPretty(tree);
    if (outPath.empty()) {
        std::cout << out;
    } else if (!writeFile(outPath, out)) {
        std::cerr << "cannot write " << outPath << "\n";
        return kUsage;
    }
    return kOk;
}

int runBench(const std::vector<BenchRow>& rows, const std::string& csvPath, bool withWindow) {
    std::string csv = csvHeader(withWindow);
    bool allConverged = true;
    for (const BenchRow& row : rows) {
        csv += csvRow(row, withWindow);
        allConverged = allConverged && row.converged;
    }
    if (csvPath.empty()) {
        std::cout << csv;
    } else if (!writeFile(csvPath, csv)) {
        std::cerr << "cannot write " << csvPath << "\n";
        return kUsage;
    }
    return allConverged ? kOk : kDiverged;
}

} // namespace

int cliMain(int argc, char** argv) {
    CLI::App app{"conflict-free collaborative tree editing toolkit"};
    app.require_subcommand(1);

    ScenarioConfig cfg;
    std::string mixText;
    std::string reorderText = "uniform-shuffle";
    std::string csvPath;
    std::string jsonPath;
    std::string logPath;

    auto* simulate = app.add_subcommand("simulate", "run one scenario and check convergence");
    simulate->add_option("--sites", cfg.nSites, "number of replicas")->required();
    simulate->add_option("--ops", cfg.nOps, "operations to generate")->required();
    simulate->add_option("--seed", cfg.seed, "scenario seed")->required();
    simulate->add_option("--mix", mixText, "add,del,chlab shares (default 0.5,0.1,0.4)");
    simulate->add_option("--reorder", reorderText,
                         "fifo-per-link | uniform-shuffle | bounded-delay");
    simulate->add_option("--delay-bound", cfg.delayBound, "bounded-delay window (default 4)");
    simulate->add_option("--csv", csvPath, "write the report as CSV");
    simulate->add_option("--json", jsonPath, "write the report as JSON");
    simulate->add_option("--log", logPath, "write the request log (JSON lines)");

    std::vector<std::string> checkPaths;
    auto* check = app.add_subcommand("check", "compare canonical exports for convergence");
    check->add_option("files", checkPaths, "canonical export files")->expected(-2);

    std::string replayPath;
    std::uint32_t replicas = 1;
    auto* replay = app.add_subcommand("replay", "re-execute a request log");
    replay->add_option("--log", replayPath, "request log (JSON lines)")->required();
    replay->add_option("--sites", replicas, "number of consumer replicas (default 1)");

    std::string importIn;
    std::string importOut;
    std::uint32_t importSite = 1;
    auto* import = app.add_subcommand("import", "turn an XML fragment into a request log");
    import->add_option("--in", importIn, "XML document")->required();
    import->add_option("--out", importOut, "request log to write");
    import->add_option("--site", importSite, "importing site id (default 1)");

    std::string exportIn;
    std::string exportOut;
    std::string exportMode = "pretty";
    auto* exportCmd = app.add_subcommand("export", "render a request log as a document");
    exportCmd->add_option("--in", exportIn, "request log (JSON lines)")->required();
    exportCmd->add_option("--out", exportOut, "file to write (stdout when absent)");
    exportCmd->add_option("--mode", exportMode, "pretty | canonical")
        ->check(CLI::IsMember({"pretty", "canonical"}));

    std::uint64_t benchOpsCount = 1000;
    std::vector<std::uint32_t> benchUsersList{10, 20, 30, 40, 50, 60, 70, 80};
    std::uint64_t benchSeed = 1;
    std::string benchCsv;
    auto* benchU = app.add_subcommand("bench-users", "scaling sweep over replica count");
    benchU->add_option("--ops", benchOpsCount, "operations per run (default 1000)");
    benchU->add_option("--users", benchUsersList, "replica counts to sweep");
    benchU->add_option("--seed", benchSeed, "seed shared by every run");
    benchU->add_option("--csv", benchCsv, "write rows as CSV");

    std::uint64_t window = 10000;
    std::vector<std::uint64_t> totals{10000, 20000, 30000, 40000,
                                      50000, 60000, 70000, 80000};
    std::uint32_t benchSites = 20;
    auto* benchO = app.add_subcommand("bench-ops", "history-size sweep at fixed replicas");
    benchO->add_option("--window", window, "final window size (default 10000)");
    benchO->add_option("--totals", totals, "total op counts to sweep");
    benchO->add_option("--users", benchSites, "replica count (default 20)");
    benchO->add_option("--seed", benchSeed, "seed shared by every run");
    benchO->add_option("--csv", benchCsv, "write rows as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (simulate->parsed()) {
            if (!mixText.empty() && !parseMix(mixText, cfg.mix)) {
                std::cerr << "--mix expects three comma-separated shares\n";
                return kUsage;
            }
            auto reorder = reorderModelFromName(reorderText);
            if (!reorder) {
                std::cerr << "unknown reorder model: " << reorderText << "\n";
                return kUsage;
            }
            cfg.reorder = *reorder;
            cfg.validate();
            return runSimulate(cfg, csvPath, jsonPath, logPath);
        }
        if (check->parsed()) return runCheck(checkPaths);
        if (replay->parsed()) return runReplay(replayPath, replicas);
        if (import->parsed()) return runImport(importIn, importOut, importSite);
        if (exportCmd->parsed()) return runExport(exportIn, exportOut, exportMode);
        if (benchU->parsed())
            return runBench(benchUsers(benchOpsCount, benchUsersList, benchSeed), benchCsv,
                            false);
        if (benchO->parsed())
            return runBench(benchOps(window, totals, benchSites, benchSeed), benchCsv, true);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

} // namespace treesync
