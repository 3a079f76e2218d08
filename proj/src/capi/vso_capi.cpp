#include "vso/vso.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "vso/composer.hpp"
#include "vso/documents.hpp"
#include "vso/error.hpp"
#include "vso/json_codec.hpp"
#include "vso/kb_io.hpp"
#include "vso/pipeline.hpp"
#include "vso/service.hpp"
#include "vso/stubs.hpp"

struct vso_class {
  std::shared_ptr<const vso::CompositeVSO> composite;
  bool is_composite = false;
};

struct vso_registry {
  vso::PackageRegistry registry;
};

struct vso_service {
  std::unique_ptr<vso::Service> service;
};

namespace {

static_assert(static_cast<int>(vso::ErrorCode::Syntax) + 1 == VSO_E_SYNTAX);
static_assert(static_cast<int>(vso::ErrorCode::Io) + 1 == VSO_E_IO);

struct LastError {
  std::string code;
  std::string path;
  std::string message;
  vso_error_info info{VSO_OK, "", "", ""};
};

thread_local LastError last_error;

vso_status fail(vso_status status, std::string code, std::string path, std::string message) {
  last_error.code = std::move(code);
  last_error.path = std::move(path);
  last_error.message = std::move(message);
  last_error.info = {status, last_error.code.c_str(), last_error.path.c_str(), last_error.message.c_str()};
  return status;
}

vso_status ok() {
  last_error.info = {VSO_OK, "", "", ""};
  return VSO_OK;
}

// Runs `fn`, turning exceptions into status codes.
template <typename Fn>
vso_status guarded(Fn&& fn) {
  try {
    fn();
    return ok();
  } catch (const vso::Error& e) {
    return fail(static_cast<vso_status>(static_cast<int>(e.code()) + 1), std::string(vso::error_code_name(e.code())),
                e.path(), e.what());
  } catch (const std::exception& e) {
    return fail(VSO_E_INTERNAL, "Internal", "", e.what());
  }
}

vso_status argument_error(const char* what) { return fail(VSO_E_ARGUMENT, "Argument", "", what); }

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

vso_class* wrap(vso::CompositeVSO c, bool is_composite) {
  auto* out = new vso_class;
  out->composite = std::make_shared<const vso::CompositeVSO>(std::move(c));
  out->is_composite = is_composite;
  return out;
}

vso_class* parse_any(std::string_view text) {
  const auto doc = vso::codec::parse_text(text);
  const bool composite = doc.is_object() && doc.contains("provenance");
  return wrap(vso::parse_composite(text), composite);
}

}  // namespace

extern "C" {

const char* vso_version(void) { return "1.0.0"; }

const vso_error_info* vso_last_error(void) { return &last_error.info; }

const char* vso_status_name(vso_status status) {
  switch (status) {
    case VSO_OK: return "Ok";
    case VSO_E_ARGUMENT: return "Argument";
    case VSO_E_INTERNAL: return "Internal";
    default: break;
  }
  if (status >= VSO_E_SYNTAX && status <= VSO_E_IO) {
    return vso::error_code_name(static_cast<vso::ErrorCode>(status - 1)).data();
  }
  return "Unknown";
}

void vso_string_free(char* s) { std::free(s); }

vso_status vso_class_parse(const char* text, vso_class** out) {
  if (!text || !out) return argument_error("null argument");
  return guarded([&] { *out = parse_any(text); });
}

vso_status vso_class_load(const char* path, vso_class** out) {
  if (!path || !out) return argument_error("null argument");
  return guarded([&] {
    const std::string text = vso::read_file(path);
    try {
      *out = parse_any(text);
    } catch (const vso::Error& e) {
      throw vso::Error(e.code(), e.path().empty() ? std::string(path) : std::string(path) + ":" + e.path(), e.what());
    }
  });
}

vso_status vso_class_serialize(const vso_class* c, char** out) {
  if (!c || !out) return argument_error("null argument");
  return guarded([&] {
    *out = copy_string(c->is_composite ? vso::serialize_composite(*c->composite)
                                       : vso::serialize_vso_class(c->composite->cls));
  });
}

vso_status vso_class_validate_text(const char* text, char** violations_json, size_t* count) {
  if (!text || !violations_json) return argument_error("null argument");
  return guarded([&] {
    const vso::VSOClass cls = vso::parse_vso_class_unchecked(text);
    const auto violations = vso::validate_vso(cls);
    vso::codec::json arr = vso::codec::json::array();
    for (const auto& v : violations) arr.push_back({{"code", v.code}, {"path", v.path}, {"message", v.message}});
    *violations_json = copy_string(vso::codec::dump(arr));
    if (count) *count = violations.size();
  });
}

vso_status vso_class_name(const vso_class* c, char** out) {
  if (!c || !out) return argument_error("null argument");
  return guarded([&] { *out = copy_string(c->composite->cls.name); });
}

void vso_class_free(vso_class* c) { delete c; }

vso_status vso_compose(const vso_class* const* classes, size_t count, vso_class** out) {
  if (!classes || !out || count == 0) return argument_error("compose needs at least one class");
  return guarded([&] {
    vso::CompositeVSO acc = *classes[0]->composite;
    for (size_t i = 1; i < count; ++i) acc = vso::compose(acc, *classes[i]->composite);
    *out = wrap(std::move(acc), true);
  });
}

vso_status vso_registry_demo(vso_registry** out) {
  if (!out) return argument_error("null argument");
  return guarded([&] { *out = new vso_registry{vso::demo_registry()}; });
}

vso_status vso_registry_empty(vso_registry** out) {
  if (!out) return argument_error("null argument");
  return guarded([&] { *out = new vso_registry{}; });
}

vso_status vso_registry_demo_without(const char* omitted_csv, vso_registry** out) {
  if (!out) return argument_error("null argument");
  return guarded([&] {
    std::set<std::string> omitted;
    std::string csv = omitted_csv ? omitted_csv : "";
    std::size_t i = 0;
    while (i <= csv.size()) {
      std::size_t j = csv.find(',', i);
      if (j == std::string::npos) j = csv.size();
      if (j > i) omitted.insert(csv.substr(i, j - i));
      i = j + 1;
    }
    *out = new vso_registry{vso::demo_registry_without(omitted)};
  });
}

vso_status vso_registry_register(vso_registry* r, const char* id, const char* const* inputs, size_t input_count,
                                 const char* const* outputs, size_t output_count, vso_package_fn fn, void* user) {
  if (!r || !id || !fn || (input_count && !inputs) || (output_count && !outputs)) return argument_error("null argument");
  return guarded([&] {
    vso::PackageStub stub;
    stub.id = id;
    for (size_t i = 0; i < input_count; ++i) stub.inputs.emplace_back(inputs[i]);
    for (size_t i = 0; i < output_count; ++i) stub.outputs.emplace_back(outputs[i]);
    stub.fn = [fn, user, names = stub.inputs](const vso::PackageData& in, const vso::ParamMap& params) {
      std::vector<vso_payload> args;
      for (const auto& n : names) {
        const auto& p = in.at(n);
        args.push_back({n.c_str(), p.data(), p.size()});
      }
      const std::string params_json = vso::codec::encode(params).dump();
      vso::PackageData written;
      auto emit = [](void* sink, const char* value, const double* data, size_t size) -> int {
        if (!sink || !value || (size && !data)) return 1;
        (*static_cast<vso::PackageData*>(sink))[value] = vso::Payload(data, data + size);
        return 0;
      };
      char error[512] = {0};
      if (fn(user, args.data(), args.size(), params_json.c_str(), emit, &written, error, sizeof error) != 0) {
        throw std::runtime_error(error[0] ? error : "package failed");
      }
      return written;
    };
    r->registry.add(std::move(stub));
  });
}

size_t vso_registry_size(const vso_registry* r) { return r ? r->registry.size() : 0; }

void vso_registry_free(vso_registry* r) { delete r; }

vso_status vso_plan(const vso_class* composite, const char* request_json, size_t cap, char** plans_json) {
  if (!composite || !request_json || !plans_json) return argument_error("null argument");
  return guarded([&] {
    const vso::TaskRequest request = vso::parse_task_request(request_json);
    *plans_json = copy_string(vso::serialize_plan_list(vso::plan_task(composite->composite, request, cap)));
  });
}

vso_status vso_mark(const vso_class* composite, const char* request_json, char** states_json) {
  if (!composite || !request_json || !states_json) return argument_error("null argument");
  return guarded([&] {
    const vso::TaskRequest request = vso::parse_task_request(request_json);
    const vso::FilteredGraph graph = vso::task_graph(composite->composite, request);
    *states_json = copy_string(vso::codec::dump(vso::encode(vso::mark_dataset_states(graph, request.available()))));
  });
}

vso_status vso_run(const vso_class* composite, const vso_registry* registry, const char* request_json,
                   long plan_index, size_t cap, const char* run_id, int wall_clock, char** run_json,
                   char** awf_json) {
  if (!composite || !registry || !request_json || !run_json) return argument_error("null argument");
  bool failed = false;
  std::string failed_block;
  std::string failed_error;
  vso_status status = guarded([&] {
    const vso::TaskRequest request = vso::parse_task_request(request_json);
    vso::PlanChoice choice;
    if (plan_index >= 0) choice = static_cast<std::size_t>(plan_index);
    std::unique_ptr<vso::Clock> clock;
    if (wall_clock) {
      clock = std::make_unique<vso::WallClock>();
    } else {
      clock = std::make_unique<vso::LogicalClock>();
    }
    const vso::TaskRun run =
        vso::run_task(composite->composite, registry->registry, request, choice, run_id ? run_id : "r1", *clock, cap);
    *run_json = copy_string(vso::serialize_run_result(run.result));
    if (awf_json) *awf_json = run.compiled.empty() ? nullptr : copy_string(vso::serialize_awf(run.compiled.front().awf));
    if (run.result.status == vso::RunStatus::failed) {
      failed = true;
      failed_block = run.result.failure ? run.result.failure->block : "";
      failed_error = run.result.failure ? run.result.failure->error : "a grid point failed";
    }
  });
  if (status == VSO_OK && failed) return fail(VSO_E_BLOCK_FAILED, "BlockFailed", failed_block, failed_error);
  return status;
}

vso_status vso_service_create(const vso_class* const* catalog, size_t count, const vso_registry* registry,
                              vso_service** out) {
  if (!out || (count && !catalog)) return argument_error("null argument");
  return guarded([&] {
    std::vector<vso::VSOClass> classes;
    for (size_t i = 0; i < count; ++i) classes.push_back(catalog[i]->composite->cls);
    vso::PackageRegistry reg = registry ? registry->registry : vso::PackageRegistry{};
    *out = new vso_service{std::make_unique<vso::Service>(std::move(classes), std::move(reg))};
  });
}

vso_status vso_service_handle(vso_service* s, const char* method, const char* path, const char* body,
                              int* http_status, char** response) {
  if (!s || !method || !path || !http_status || !response) return argument_error("null argument");
  return guarded([&] {
    const vso::ServiceResponse r = s->service->handle(method, path, body ? body : "");
    *http_status = r.status;
    *response = copy_string(r.body);
  });
}

vso_status vso_service_listen(vso_service* s, const char* host, int port) {
  if (!s || !host) return argument_error("null argument");
  bool bound = true;
  vso_status status = guarded([&] { bound = s->service->listen(host, port); });
  if (status == VSO_OK && !bound) return fail(VSO_E_IO, "IoError", host, "cannot listen on port " + std::to_string(port));
  return status;
}

void vso_service_stop(vso_service* s) {
  if (s) s->service->stop();
}

void vso_service_free(vso_service* s) { delete s; }

}  // extern "C"
