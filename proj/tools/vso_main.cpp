// vso: validate, compose, plan, run and serve knowledge bases.
//
// Exit codes: 0 ok, 1 input or validation error, 2 I/O error, 3 no plan,
// 4 run failed.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vso/vso.h"

namespace {

using json = nlohmann::json;

enum Exit { kOk = 0, kInput = 1, kIo = 2, kNoPlan = 3, kRunFailed = 4 };

struct Options {
  std::vector<std::string> kb;
  std::string out;
  std::string format = "human";
  std::size_t cap = 64;
  std::string plan = "auto";
  std::string request;
  std::vector<std::string> without;
  bool wall_clock = false;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int exit_code(vso_status s) {
  switch (s) {
    case VSO_OK: return kOk;
    case VSO_E_IO: return kIo;
    case VSO_E_NO_PLAN: return kNoPlan;
    case VSO_E_BLOCK_FAILED: return kRunFailed;
    default: return kInput;
  }
}

int report(vso_status s) {
  const vso_error_info* e = vso_last_error();
  std::cerr << "error: " << e->code;
  if (*e->path) std::cerr << " at " << e->path;
  std::cerr << ": " << e->message << "\n";
  return exit_code(s);
}

struct Text {
  char* ptr = nullptr;
  ~Text() { vso_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct Classes {
  std::vector<vso_class*> items;
  ~Classes() {
    for (auto* c : items) vso_class_free(c);
  }
};

bool read_text(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

vso_status load_all(const std::vector<std::string>& paths, Classes& classes) {
  for (const auto& p : paths) {
    vso_class* c = nullptr;
    const vso_status s = vso_class_load(p.c_str(), &c);
    if (s != VSO_OK) return s;
    classes.items.push_back(c);
  }
  return VSO_OK;
}

// The composite the KB arguments describe: a single document as is, several
// classes composed left to right.
vso_status composite_of(const std::vector<std::string>& paths, Classes& classes, vso_class** out) {
  if (const vso_status s = load_all(paths, classes); s != VSO_OK) return s;
  if (classes.items.size() == 1) {
    *out = classes.items.front();
    return VSO_OK;
  }
  vso_class* composite = nullptr;
  const vso_status s = vso_compose(classes.items.data(), classes.items.size(), &composite);
  if (s == VSO_OK) {
    classes.items.push_back(composite);
    *out = composite;
  }
  return s;
}

int cmd_validate(const Options& o) {
  json files = json::array();
  bool all_valid = true;
  for (const auto& path : o.kb) {
    std::string text;
    if (!read_text(path, text)) {
      std::cerr << "error: IoError at " << path << ": cannot read file\n";
      return kIo;
    }
    Text violations;
    std::size_t count = 0;
    const vso_status s = vso_class_validate_text(text.c_str(), &violations.ptr, &count);
    json entry = {{"path", path}};
    if (s != VSO_OK) {
      const vso_error_info* e = vso_last_error();
      entry["violations"] = json::array({{{"code", e->code}, {"path", e->path}, {"message", e->message}}});
    } else {
      entry["violations"] = json::parse(violations.str());
    }
    entry["valid"] = entry["violations"].empty();
    all_valid = all_valid && entry["valid"].get<bool>();
    files.push_back(entry);
  }
  if (o.format == "machine") {
    std::cout << json{{"format_version", 1}, {"files", files}}.dump(2) << "\n";
  } else {
    for (const auto& f : files) {
      if (f["valid"].get<bool>()) {
        std::cout << f["path"].get<std::string>() << ": valid\n";
        continue;
      }
      for (const auto& v : f["violations"]) {
        std::cout << f["path"].get<std::string>() << ": " << v["code"].get<std::string>() << " at "
                  << v["path"].get<std::string>() << ": " << v["message"].get<std::string>() << "\n";
      }
    }
  }
  return all_valid ? kOk : kInput;
}

int cmd_compose(const Options& o) {
  if (o.kb.size() < 2) {
    std::cerr << "error: compose needs at least two --kb classes\n";
    return kInput;
  }
  Classes classes;
  vso_class* composite = nullptr;
  if (const vso_status s = composite_of(o.kb, classes, &composite); s != VSO_OK) return report(s);
  Text doc;
  if (const vso_status s = vso_class_serialize(composite, &doc.ptr); s != VSO_OK) return report(s);
  if (o.out.empty()) {
    std::cout << doc.str();
    return kOk;
  }
  const auto path = std::filesystem::path(o.out) / "composite.json";
  if (!write_text(path, doc.str())) {
    std::cerr << "error: IoError at " << path.string() << ": cannot write file\n";
    return kIo;
  }
  if (o.format == "human") {
    const json c = json::parse(doc.str());
    std::size_t transitions = 0;
    for (const auto& m : c["models"]) transitions += m.contains("transition") && !m["transition"].is_null();
    std::cout << "composed " << c["vso_class"].get<std::string>() << ": " << c["models"].size() << " models ("
              << transitions << " transition), " << c["edges"].size() << " edges -> " << path.string() << "\n";
  }
  return kOk;
}

bool read_request(const Options& o, std::string& text, int& code) {
  if (o.request.empty()) {
    std::cerr << "error: --request is required\n";
    code = kInput;
    return false;
  }
  if (!read_text(o.request, text)) {
    std::cerr << "error: IoError at " << o.request << ": cannot read file\n";
    code = kIo;
    return false;
  }
  return true;
}

void print_plans_human(const json& doc) {
  const auto& plans = doc["plans"];
  std::cout << plans.size() << " plan(s), cap " << doc["cap"].get<std::size_t>() << "\n";
  if (doc["truncated"].get<bool>()) std::cout << "truncated: more plans exist than the cap allows\n";
  for (const auto& p : plans) {
    std::cout << "#" << p["rank"].get<std::size_t>() << "  score " << p["score"].get<double>() << "  ";
    bool first = true;
    for (const auto& m : p["models"]) {
      std::cout << (first ? "" : " -> ") << m["model"].get<std::string>();
      first = false;
    }
    if (p["models"].empty()) std::cout << "(no models: requested data is provided)";
    std::cout << "\n";
  }
}

int cmd_plan(const Options& o) {
  std::string request;
  int code = kOk;
  if (!read_request(o, request, code)) return code;
  Classes classes;
  vso_class* composite = nullptr;
  if (const vso_status s = composite_of(o.kb, classes, &composite); s != VSO_OK) return report(s);
  Text plans;
  if (const vso_status s = vso_plan(composite, request.c_str(), o.cap, &plans.ptr); s != VSO_OK) {
    const int rc = report(s);
    if (s == VSO_E_NO_PLAN) std::cerr << "blockers: " << vso_last_error()->path << "\n";
    return rc;
  }
  if (!o.out.empty() && !write_text(std::filesystem::path(o.out) / "plans.json", plans.str())) {
    std::cerr << "error: IoError at " << o.out << ": cannot write plans.json\n";
    return kIo;
  }
  if (o.format == "machine") {
    std::cout << plans.str();
  } else {
    print_plans_human(json::parse(plans.str()));
  }
  return kOk;
}

int cmd_run(const Options& o) {
  std::string request;
  int code = kOk;
  if (!read_request(o, request, code)) return code;
  long index = VSO_PLAN_AUTO;
  if (o.plan != "auto") {
    try {
      index = std::stol(o.plan);
    } catch (const std::exception&) {
      index = -2;
    }
    if (index < 0) {
      std::cerr << "error: --plan takes an index or 'auto'\n";
      return kInput;
    }
  }
  Classes classes;
  vso_class* composite = nullptr;
  if (const vso_status s = composite_of(o.kb, classes, &composite); s != VSO_OK) return report(s);
  std::string omitted;
  for (const auto& id : o.without) omitted += (omitted.empty() ? "" : ",") + id;
  vso_registry* registry = nullptr;
  if (const vso_status s = vso_registry_demo_without(omitted.c_str(), &registry); s != VSO_OK) return report(s);
  Text run;
  Text awf;
  const vso_status s =
      vso_run(composite, registry, request.c_str(), index, o.cap, "r1", o.wall_clock ? 1 : 0, &run.ptr, &awf.ptr);
  vso_registry_free(registry);
  if (s != VSO_OK && s != VSO_E_BLOCK_FAILED) return report(s);

  if (!o.out.empty()) {
    const std::filesystem::path dir(o.out);
    if (!write_text(dir / "run.json", run.str()) || (awf.ptr && !write_text(dir / "awf.json", awf.str()))) {
      std::cerr << "error: IoError at " << o.out << ": cannot write run outputs\n";
      return kIo;
    }
  }
  if (o.format == "machine") {
    std::cout << run.str();
  } else {
    const json r = json::parse(run.str());
    std::cout << "run " << r["run_id"].get<std::string>() << ": " << r["status"].get<std::string>() << "\n";
    for (const auto& v : r["values"]) {
      std::cout << "  " << v["value"].get<std::string>();
      if (!v["basis"].is_null()) std::cout << "@" << v["basis"].get<std::string>();
      std::cout << " = " << v["payload"].dump() << "  quality " << v["quality"].dump() << "\n";
    }
    if (!r["failure"].is_null()) {
      std::cout << "  failed in " << r["failure"]["block"].get<std::string>() << ": "
                << r["failure"]["error"].get<std::string>() << "\n";
    }
    if (r.contains("sweep")) {
      for (const auto& p : r["sweep"]["points"]) {
        std::cout << "  " << p["run_id"].get<std::string>() << " objective " << p["objective"].dump() << "\n";
      }
      std::cout << "  best " << r["sweep"]["best"].dump() << "\n";
    }
  }
  if (s == VSO_E_BLOCK_FAILED) {
    report(s);
    return kRunFailed;
  }
  return kOk;
}

vso_service* running_service = nullptr;

void on_signal(int) {
  if (running_service) vso_service_stop(running_service);
}

int cmd_serve(const Options& o) {
  Classes classes;
  if (const vso_status s = load_all(o.kb, classes); s != VSO_OK) return report(s);
  vso_registry* registry = nullptr;
  if (const vso_status s = vso_registry_demo(&registry); s != VSO_OK) return report(s);
  vso_service* service = nullptr;
  const vso_status s = vso_service_create(classes.items.data(), classes.items.size(), registry, &service);
  vso_registry_free(registry);
  if (s != VSO_OK) return report(s);
  running_service = service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving on http://" << o.host << ":" << o.port << "\n";
  const vso_status ls = vso_service_listen(service, o.host.c_str(), o.port);
  running_service = nullptr;
  vso_service_free(service);
  return ls == VSO_OK ? kOk : report(ls);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual simulation object toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_kb = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--kb", o.kb, "Knowledge base or composite document (repeatable)");
    if (required) opt->required();
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
  };

  auto* validate = app.add_subcommand("validate", "Check knowledge base documents");
  add_kb(validate, true);
  add_format(validate);

  auto* compose = app.add_subcommand("compose", "Compose classes into composite.json");
  add_kb(compose, true);
  compose->add_option("--out", o.out, "Output directory");
  add_format(compose);

  auto* plan = app.add_subcommand("plan", "Enumerate and rank plans for a task request");
  add_kb(plan, true);
  plan->add_option("--request", o.request, "Task request document")->required();
  plan->add_option("--cap", o.cap, "Maximum number of plans")->check(CLI::PositiveNumber);
  plan->add_option("--out", o.out, "Also write plans.json here");
  add_format(plan);

  auto* run = app.add_subcommand("run", "Plan, compile and execute a task request");
  add_kb(run, true);
  run->add_option("--request", o.request, "Task request document")->required();
  run->add_option("--plan", o.plan, "Plan index (0 = top ranked) or auto");
  run->add_option("--cap", o.cap, "Maximum number of plans")->check(CLI::PositiveNumber);
  run->add_option("--out", o.out, "Write run.json and awf.json here");
  run->add_option("--without-stub", o.without, "Leave a demo package out of the registry (repeatable)");
  run->add_flag("--wall-clock", o.wall_clock, "Timestamp the trace with the wall clock");
  add_format(run);

  auto* serve = app.add_subcommand("serve", "Serve the session API over HTTP");
  add_kb(serve, false);
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }

  if (*validate) return cmd_validate(o);
  if (*compose) return cmd_compose(o);
  if (*plan) return cmd_plan(o);
  if (*run) return cmd_run(o);
  if (*serve) return cmd_serve(o);
  return kInput;
}
