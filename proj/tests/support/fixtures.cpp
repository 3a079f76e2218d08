#include "support/fixtures.hpp"

#include "vso/composer.hpp"
#include "vso/documents.hpp"
#include "vso/kb_io.hpp"

namespace vso::test {

std::string source_path(const std::string& relative) { return std::string(VSO_SOURCE_DIR) + "/" + relative; }

std::string read_source(const std::string& relative) { return read_file(source_path(relative)); }

VSOClass load_class(const std::string& relative) { return parse_vso_class(read_source(relative)); }

VSOClass sea_class() { return load_class("kb/sea.json"); }

VSOClass ship_class() { return load_class("kb/ship.json"); }

std::shared_ptr<const CompositeVSO> sea_ship() {
  return std::make_shared<const CompositeVSO>(compose(sea_class(), ship_class()));
}

TaskRequest golden_request() { return parse_task_request(read_source("tests/fixtures/golden_request.json")); }

}  // namespace vso::test
