#pragma once

// Package registry, AWF -> CWF binding and deterministic execution.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vso/awf.hpp"
#include "vso/kb.hpp"
#include "vso/planner.hpp"

namespace vso {

/// Package payloads keyed by value id.
using PackageData = std::map<std::string, Payload>;
using PackageFn = std::function<PackageData(const PackageData& inputs, const ParamMap& params)>;

/// In-process stand-in for a simulation package. Signatures are value ids;
/// a stub may throw to signal failure.
struct PackageStub {
  std::string id;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  PackageFn fn;
};

class PackageRegistry {
 public:
  /// DuplicatePackage when the id is taken.
  void add(PackageStub stub);
  const PackageStub* find(const std::string& id) const;
  std::size_t size() const { return stubs_.size(); }
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PackageStub> stubs_;
};

/// A bound AWF: blocks in execution order with their stubs. Inline blocks
/// have no stub and run on the built-in selection interpreter.
struct CWF {
  AWF awf;
  std::vector<std::string> order;
  std::map<std::string, PackageStub> bound;  // by block id
  std::size_t builtin_blocks = 0;
};

/// MissingPackage (path lists every unbound package) or SignatureMismatch:
/// a single-stage stub must need no more than its block consumes and deliver
/// at least what it produces; chained stages may also read what earlier
/// stages wrote, and together must deliver the model outputs.
CWF bind_packages(const AWF& awf, const PackageRegistry& registry);

/// Source of trace timestamps (ISO-8601 UTC).
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::string now() = 0;
};

/// Starts at `origin` and advances one second per reading.
class LogicalClock : public Clock {
 public:
  explicit LogicalClock(std::int64_t origin_seconds = 0) : next_(origin_seconds) {}
  std::string now() override;

 private:
  std::int64_t next_;
};

class WallClock : public Clock {
 public:
  std::string now() override;
};

std::string format_utc(std::chrono::system_clock::time_point t);

enum class RunStatus { succeeded, failed };
std::string to_string(RunStatus s);
RunStatus parse_run_status(const std::string& s);

struct RunValue {
  Payload payload;
  QualityPoint quality;

  bool operator==(const RunValue&) const = default;
};

struct BlockTrace {
  std::string block;
  std::string started;
  std::string finished;
  RunStatus status = RunStatus::succeeded;

  bool operator==(const BlockTrace&) const = default;
};

struct RunFailure {
  std::string block;
  std::string error;

  bool operator==(const RunFailure&) const = default;
};

/// One grid point of an optimization run.
struct SweepPoint {
  std::string run_id;
  std::map<DataKey, Payload> parameters;
  RunStatus status = RunStatus::succeeded;
  std::optional<double> objective;  // mean of the objective payload

  bool operator==(const SweepPoint&) const = default;
};

struct SweepSummary {
  DataKey objective;
  Goal goal = Goal::minimize;
  std::vector<SweepPoint> points;
  std::optional<std::size_t> best;

  bool operator==(const SweepSummary&) const = default;
};

struct RunResult {
  std::string run_id;
  RunStatus status = RunStatus::succeeded;
  std::map<DataKey, RunValue> values;
  std::vector<BlockTrace> trace;
  std::optional<RunFailure> failure;
  std::optional<SweepSummary> sweep;

  bool operator==(const RunResult&) const = default;
};

/// Runs the blocks in order. Consumers read what a linked producer wrote,
/// otherwise the external input. Stub outputs are tagged simulated (measured
/// axis 0) with every other axis the minimum over the consumed data; a block
/// without inputs keeps its declared quality. The selection interpreter
/// keeps the quality of its input. A throwing block fails the run (status
/// failed, trace kept up to that block). InvalidRequest when an external
/// input has no payload.
RunResult execute(const CWF& cwf, const std::map<DataKey, Payload>& inputs,
                  const std::map<DataKey, QualityPoint>& input_quality, const std::string& run_id, Clock& clock);

/// Re-samples one inline block's input according to its script and the
/// basis parameters it carries.
Payload run_selection(const AWFBlock& block, const Payload& input);

}  // namespace vso
