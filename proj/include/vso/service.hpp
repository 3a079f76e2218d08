#pragma once

// Session-scoped service: KB browsing, assembly, composition, marking,
// planning and runs. `handle` routes one request in-process; `listen` serves
// the same routes over HTTP.
//
//   POST /sessions                          -> {session}
//   GET  /classes                           -> catalog summary
//   POST /sessions/{id}/commands            command envelope -> session state
//   GET  /sessions/{id}/state               -> session state
//   POST /sessions/{id}/plans               task request -> ranked plan list
//   POST /sessions/{id}/runs                {request, plan} -> {run_id, status}
//   GET  /sessions/{id}/runs/{rid}          -> run result
//
// Errors come back as {code, path, message} with a 4xx status.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vso/kb.hpp"
#include "vso/planner.hpp"
#include "vso/runtime.hpp"

namespace httplib {
class Server;
}

namespace vso {

struct ServiceResponse {
  int status = 200;
  std::string body;
};

struct ServiceConfig {
  std::size_t plan_cap = kDefaultPlanCap;
  /// Trace timestamps from the wall clock instead of a per-run logical clock.
  bool wall_clock = false;
};

struct Session {
  std::string id;
  std::map<std::string, std::shared_ptr<const VSOClass>> classes;  // loaded, by name
  std::map<std::string, VSOInstance> instances;                    // by class name
  std::vector<std::string> composed;                               // class names
  std::shared_ptr<const CompositeVSO> composite;                   // flags and scenarios applied
  std::set<std::string> disabled;
  std::map<std::string, std::string> scenarios;  // model -> selected scenario
  std::map<DataKey, ProvidedData> provided;
  TaskMode mode = TaskMode::analysis;
  std::optional<ForecastSpec> forecast;
  std::optional<OptimizationSpec> optimization;
  std::map<std::string, RunResult> runs;
  std::size_t next_run = 1;
  std::mutex mutex;
};

class Service {
 public:
  Service(std::vector<VSOClass> catalog, PackageRegistry registry, ServiceConfig config = {});
  ~Service();

  ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

  /// Blocks until stop(). Returns false when the port cannot be bound.
  bool listen(const std::string& host, int port);
  void stop();

 private:
  std::shared_ptr<Session> session(const std::string& id);
  std::string create_session();
  std::string catalog_document() const;
  std::string state_document(Session& s) const;
  void apply_command(Session& s, const std::string& body);
  void rebuild(Session& s);
  TaskRequest merged_request(const Session& s, const std::string& body) const;
  std::string plans(Session& s, const std::string& body);
  std::string run(Session& s, const std::string& body);

  std::map<std::string, VSOClass> catalog_;
  PackageRegistry registry_;
  ServiceConfig config_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_session_ = 1;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace vso
