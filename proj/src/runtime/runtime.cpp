#include "vso/runtime.hpp"

#include <algorithm>
#include <ctime>
#include <stdexcept>

#include "vso/basis.hpp"
#include "vso/error.hpp"

namespace vso {

namespace {

bool is_token(const DataKey& key, const AWFBlock& block) {
  return !key.basis && key.value.rfind(block.model + ".stage", 0) == 0;
}

Basis basis_from_params(const std::string& id, BasisKind kind, const ParamMap& params) {
  Basis b;
  b.id = id;
  b.kind = kind;
  const std::string prefix = "basis." + id + ".";
  for (const auto& [k, v] : params) {
    if (k.rfind(prefix, 0) == 0) b.params[k.substr(prefix.size())] = v;
  }
  return b;
}

QualityPoint derived_quality(const QualityPoint& declared, const std::vector<const QualityPoint*>& consumed) {
  QualityPoint out = declared;
  for (auto& [axis, v] : out) {
    if (axis == kMeasuredAxis) {
      v = 0.0;
      continue;
    }
    if (consumed.empty()) continue;
    double m = 0.0;
    bool first = true;
    for (const QualityPoint* q : consumed) {
      auto it = q->find(axis);
      const double x = it == q->end() ? 0.0 : it->second;
      m = first ? x : std::min(m, x);
      first = false;
    }
    v = m;
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

}  // namespace

void PackageRegistry::add(PackageStub stub) {
  const std::string id = stub.id;
  if (!stubs_.emplace(id, std::move(stub)).second) {
    throw Error(ErrorCode::DuplicatePackage, id, "package '" + id + "' is already registered");
  }
}

const PackageStub* PackageRegistry::find(const std::string& id) const {
  auto it = stubs_.find(id);
  return it == stubs_.end() ? nullptr : &it->second;
}

std::vector<std::string> PackageRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, s] : stubs_) out.push_back(id);
  return out;
}

CWF bind_packages(const AWF& awf, const PackageRegistry& registry) {
  CWF cwf;
  cwf.awf = awf;
  std::vector<std::string> missing;
  std::map<std::string, std::set<std::string>> written;  // by model, across stages

  for (const auto& b : awf.blocks) {
    if (b.kind == BlockKind::inline_script) {
      auto it = b.params.find(kScriptParam);
      if (it == b.params.end() || !std::holds_alternative<std::string>(it->second)) {
        throw Error(ErrorCode::SignatureMismatch, b.id, "inline block '" + b.id + "' carries no script");
      }
      const auto script = basis::parse_selection_script(std::get<std::string>(it->second));
      const bool shape = b.consumes.size() == 1 && b.produces.size() == 1 &&
                         b.consumes.begin()->first.value == b.produces.begin()->first.value &&
                         b.consumes.begin()->first.basis == script.from &&
                         b.produces.begin()->first.basis == script.to;
      if (!shape) {
        throw Error(ErrorCode::SignatureMismatch, b.id,
                    "script of '" + b.id + "' does not match what the block consumes and produces");
      }
      ++cwf.builtin_blocks;
      continue;
    }
    if (!b.package) throw Error(ErrorCode::SignatureMismatch, b.id, "package block '" + b.id + "' names no package");
    const PackageStub* stub = registry.find(*b.package);
    if (!stub) {
      missing.push_back(*b.package);
      continue;
    }
    std::set<std::string> readable = written[b.model];
    std::set<std::string> consumed_values;
    for (const auto& [key, q] : b.consumes) {
      if (is_token(key, b)) continue;
      if (!consumed_values.insert(key.value).second) {
        throw Error(ErrorCode::SignatureMismatch, b.id,
                    "block '" + b.id + "' consumes value '" + key.value + "' on more than one basis");
      }
      readable.insert(key.value);
    }
    for (const auto& in : stub->inputs) {
      if (!readable.count(in)) {
        throw Error(ErrorCode::SignatureMismatch, b.id,
                    "package '" + stub->id + "' reads '" + in + "' which block '" + b.id + "' does not consume");
      }
    }
    written[b.model].insert(stub->outputs.begin(), stub->outputs.end());
    for (const auto& [key, q] : b.produces) {
      if (is_token(key, b)) continue;
      if (!written[b.model].count(key.value)) {
        throw Error(ErrorCode::SignatureMismatch, b.id,
                    "package '" + stub->id + "' does not write '" + key.value + "' produced by block '" + b.id + "'");
      }
    }
    cwf.bound.emplace(b.id, *stub);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    throw Error(ErrorCode::MissingPackage, join(missing), "no registered package for: " + join(missing));
  }
  cwf.order = topo_order(awf);
  return cwf;
}

std::string format_utc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string LogicalClock::now() {
  return format_utc(std::chrono::system_clock::time_point(std::chrono::seconds(next_++)));
}

std::string WallClock::now() { return format_utc(std::chrono::system_clock::now()); }

std::string to_string(RunStatus s) { return s == RunStatus::succeeded ? "succeeded" : "failed"; }

RunStatus parse_run_status(const std::string& s) {
  if (s == "succeeded") return RunStatus::succeeded;
  if (s == "failed") return RunStatus::failed;
  throw Error(ErrorCode::Syntax, "status", "unknown run status '" + s + "'");
}

Payload run_selection(const AWFBlock& block, const Payload& input) {
  auto it = block.params.find(kScriptParam);
  if (it == block.params.end() || !std::holds_alternative<std::string>(it->second)) {
    throw Error(ErrorCode::SignatureMismatch, block.id, "inline block carries no script");
  }
  const auto script = basis::parse_selection_script(std::get<std::string>(it->second));
  const Basis from = basis_from_params(script.from, script.kind, block.params);
  const Basis to = basis_from_params(script.to, script.kind, block.params);
  return basis::select(from, to, input);
}

RunResult execute(const CWF& cwf, const std::map<DataKey, Payload>& inputs,
                  const std::map<DataKey, QualityPoint>& input_quality, const std::string& run_id, Clock& clock) {
  const AWF& awf = cwf.awf;
  std::map<DataKey, RunValue> external;
  for (const auto& [key, declared] : awf.external_inputs) {
    auto it = inputs.find(key);
    if (it == inputs.end()) {
      throw Error(ErrorCode::InvalidRequest, key.str(), "no payload for workflow input " + key.str());
    }
    auto qit = input_quality.find(key);
    external[key] = {it->second, qit == input_quality.end() ? declared : qit->second};
  }

  RunResult result;
  result.run_id = run_id;
  result.values = external;
  std::map<std::string, std::map<DataKey, RunValue>> produced;
  std::map<std::string, PackageData> scratch;

  for (const auto& id : cwf.order) {
    const AWFBlock& block = *awf.find_block(id);
    BlockTrace trace{id, clock.now(), "", RunStatus::succeeded};
    try {
      std::map<DataKey, const RunValue*> consumed;
      for (const auto& [key, q] : block.consumes) {
        const RunValue* v = nullptr;
        for (const auto& l : awf.links) {
          if (l.to_block != id || l.data.key != key) continue;
          auto pit = produced.find(l.from_block);
          if (pit == produced.end()) continue;
          auto vit = pit->second.find(key);
          if (vit != pit->second.end()) {
            v = &vit->second;
            break;
          }
        }
        if (!v) {
          auto eit = external.find(key);
          if (eit == external.end()) throw std::runtime_error("input " + key.str() + " is not available");
          v = &eit->second;
        }
        consumed[key] = v;
      }
      std::vector<const QualityPoint*> qualities;
      for (const auto& [key, v] : consumed) {
        if (!is_token(key, block)) qualities.push_back(&v->quality);
      }

      std::map<DataKey, RunValue> outs;
      if (block.kind == BlockKind::inline_script) {
        const RunValue& in = *consumed.begin()->second;
        outs[block.produces.begin()->first] = {run_selection(block, in.payload), in.quality};
      } else {
        const PackageStub& stub = cwf.bound.at(id);
        PackageData& data = scratch[block.model];
        for (const auto& [key, v] : consumed) {
          if (!is_token(key, block)) data[key.value] = v->payload;
        }
        PackageData args;
        for (const auto& in : stub.inputs) args[in] = data.at(in);
        PackageData written = stub.fn(args, block.params);
        for (const auto& out : stub.outputs) {
          auto wit = written.find(out);
          if (wit == written.end()) throw std::runtime_error("package '" + stub.id + "' did not write '" + out + "'");
          data[out] = wit->second;
        }
        for (const auto& [key, declared] : block.produces) {
          Payload payload;
          if (!is_token(key, block)) payload = data.at(key.value);
          outs[key] = {std::move(payload), derived_quality(declared, qualities)};
        }
      }
      trace.finished = clock.now();
      result.trace.push_back(trace);
      for (const auto& [key, v] : outs) {
        if (!is_token(key, block)) result.values.try_emplace(key, v);
      }
      produced[id] = std::move(outs);
    } catch (const std::exception& e) {
      trace.finished = clock.now();
      trace.status = RunStatus::failed;
      result.trace.push_back(trace);
      result.status = RunStatus::failed;
      result.failure = RunFailure{id, e.what()};
      return result;
    }
  }
  return result;
}

}  // namespace vso
