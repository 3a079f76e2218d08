/* C interface to the VSO engine: knowledge-base classes, composition,
 * planning, workflow runs and the session service.
 *
 * Every call returns a vso_status. On failure, vso_last_error() describes
 * the error of the calling thread until its next call. Strings returned
 * through char** are owned by the caller and released with
 * vso_string_free. */

#ifndef VSO_VSO_H
#define VSO_VSO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define VSO_API __declspec(dllexport)
#else
#define VSO_API __attribute__((visibility("default")))
#endif

typedef enum vso_status {
  VSO_OK = 0,
  VSO_E_SYNTAX,
  VSO_E_REFERENCE,
  VSO_E_INVARIANT,
  VSO_E_TYPE_MISMATCH,
  VSO_E_UNKNOWN_PARAM,
  VSO_E_AXIS_CONFLICT,
  VSO_E_UNIT_CONFLICT,
  VSO_E_BASIS_ID_COLLISION,
  VSO_E_MODEL_ID_COLLISION,
  VSO_E_UNKNOWN_MODEL,
  VSO_E_UNKNOWN_BASIS,
  VSO_E_NO_PLAN,
  VSO_E_MODE_SPEC_MISSING,
  VSO_E_INVALID_REQUEST,
  VSO_E_UNRESOLVED_PARAM,
  VSO_E_MISSING_PACKAGE,
  VSO_E_SIGNATURE_MISMATCH,
  VSO_E_DUPLICATE_PACKAGE,
  VSO_E_CYCLE_DETECTED,
  VSO_E_BLOCK_FAILED,
  VSO_E_NO_COMPOSITE,
  VSO_E_UNKNOWN_SESSION,
  VSO_E_UNKNOWN_RUN,
  VSO_E_UNKNOWN_CLASS,
  VSO_E_UNKNOWN_COMMAND,
  VSO_E_IO,
  VSO_E_ARGUMENT,
  VSO_E_INTERNAL
} vso_status;

typedef struct vso_error_info {
  vso_status status;
  const char* code;    /* e.g. "NoPlan" */
  const char* path;    /* offending element, may be empty */
  const char* message;
} vso_error_info;

typedef struct vso_class vso_class;       /* a class or composite */
typedef struct vso_registry vso_registry; /* package registry */
typedef struct vso_service vso_service;

VSO_API const char* vso_version(void);
VSO_API const vso_error_info* vso_last_error(void);
VSO_API const char* vso_status_name(vso_status status);
VSO_API void vso_string_free(char* s);

/* Classes and composites. Parsing validates; validation reports every
 * violation as a JSON array of {code, path, message}. */
VSO_API vso_status vso_class_parse(const char* text, vso_class** out);
VSO_API vso_status vso_class_load(const char* path, vso_class** out);
VSO_API vso_status vso_class_serialize(const vso_class* c, char** out);
VSO_API vso_status vso_class_validate_text(const char* text, char** violations_json, size_t* count);
VSO_API vso_status vso_class_name(const vso_class* c, char** out);
VSO_API void vso_class_free(vso_class* c);

/* Left fold of compose over `count` classes (count >= 1). */
VSO_API vso_status vso_compose(const vso_class* const* classes, size_t count, vso_class** out);

/* Packages. */
typedef struct vso_payload {
  const char* value; /* value id */
  const double* data;
  size_t size;
} vso_payload;

/* Writes outputs through `emit` (value id, samples); returns non-zero and
 * fills `error` (up to error_size bytes) on failure. */
typedef int (*vso_emit_fn)(void* sink, const char* value, const double* data, size_t size);
typedef int (*vso_package_fn)(void* user, const vso_payload* inputs, size_t input_count, const char* params_json,
                              vso_emit_fn emit, void* sink, char* error, size_t error_size);

VSO_API vso_status vso_registry_demo(vso_registry** out);
VSO_API vso_status vso_registry_empty(vso_registry** out);
/* Demo registry minus the comma separated package ids. */
VSO_API vso_status vso_registry_demo_without(const char* omitted_csv, vso_registry** out);
VSO_API vso_status vso_registry_register(vso_registry* r, const char* id, const char* const* inputs,
                                         size_t input_count, const char* const* outputs, size_t output_count,
                                         vso_package_fn fn, void* user);
VSO_API size_t vso_registry_size(const vso_registry* r);
VSO_API void vso_registry_free(vso_registry* r);

/* Planning and runs. `request_json` is a task request document. */
VSO_API vso_status vso_plan(const vso_class* composite, const char* request_json, size_t cap, char** plans_json);
/* Dataset states (JSON array) for the composite's enabled models given the
 * request's provided data and parameters. */
VSO_API vso_status vso_mark(const vso_class* composite, const char* request_json, char** states_json);
/* plan_index < 0 picks the top-ranked plan. awf_json (may be NULL) receives
 * the AWF document of the first executed request. A failed run returns
 * VSO_E_BLOCK_FAILED with run_json still filled. */
#define VSO_PLAN_AUTO (-1)
VSO_API vso_status vso_run(const vso_class* composite, const vso_registry* registry, const char* request_json,
                           long plan_index, size_t cap, const char* run_id, int wall_clock, char** run_json,
                           char** awf_json);

/* Service. `catalog` classes are offered by GET /classes. */
VSO_API vso_status vso_service_create(const vso_class* const* catalog, size_t count, const vso_registry* registry,
                                      vso_service** out);
VSO_API vso_status vso_service_handle(vso_service* s, const char* method, const char* path, const char* body,
                                      int* http_status, char** response);
/* Blocks until vso_service_stop. */
VSO_API vso_status vso_service_listen(vso_service* s, const char* host, int port);
VSO_API void vso_service_stop(vso_service* s);
VSO_API void vso_service_free(vso_service* s);

#ifdef __cplusplus
}
#endif

#endif /* VSO_VSO_H */
