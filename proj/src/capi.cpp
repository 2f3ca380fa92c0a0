#include "ambit.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "ambit/engine.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

ambit_status status_of(const std::exception& e) {
    set_error(e.what());
    if (dynamic_cast<const ambit::config_error*>(&e)) return AMBIT_CONFIG_ERROR;
    if (dynamic_cast<const ambit::domain_error*>(&e)) return AMBIT_DOMAIN_ERROR;
    if (dynamic_cast<const ambit::numeric_error*>(&e))
        return AMBIT_NUMERIC_ERROR;
    if (dynamic_cast<const ambit::input_error*>(&e)) return AMBIT_CONFIG_ERROR;
    if (dynamic_cast<const ambit::classification_error*>(&e))
        return AMBIT_NUMERIC_ERROR;
    return AMBIT_INVALID_ARGUMENT;
}

std::vector<std::string> split_csv(const char* csv) {
    std::vector<std::string> out;
    if (!csv) return out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // trim spaces
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

struct ambit_engine {
    ambit::Engine impl;
    std::string report;
    explicit ambit_engine(const char* cfg) : impl(std::string(cfg)) {}
};

extern "C" {

const char* ambit_version(void) { return ambit::kVersion; }

const char* ambit_config_schema(void) {
    return ambit::config_schema().c_str();
}

const char* ambit_last_error(void) { return g_last_error.c_str(); }

ambit_engine* ambit_engine_create(const char* config_json) {
    if (!config_json) {
        set_error("config_json is NULL");
        return nullptr;
    }
    try {
        return new ambit_engine(config_json);
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void ambit_engine_destroy(ambit_engine* engine) { delete engine; }

ambit_status ambit_engine_run(ambit_engine* engine, const char* suites_csv) {
    if (!engine) {
        set_error("engine is NULL");
        return AMBIT_INVALID_ARGUMENT;
    }
    try {
        const bool ok = engine->impl.run(split_csv(suites_csv));
        engine->report = engine->impl.report_json();
        return ok ? AMBIT_OK : AMBIT_SUITE_FAILURE;
    } catch (const std::exception& e) {
        return status_of(e);
    }
}

const char* ambit_engine_report(const ambit_engine* engine) {
    if (!engine || engine->report.empty()) return nullptr;
    return engine->report.c_str();
}

ambit_status ambit_engine_dump(ambit_engine* engine, const char* fields_csv,
                               int nx, int ny, char** out) {
    if (!engine || !out) {
        set_error("engine or out is NULL");
        return AMBIT_INVALID_ARGUMENT;
    }
    *out = nullptr;
    try {
        const std::string csv =
            engine->impl.dump_csv(split_csv(fields_csv), nx, ny);
        char* buf = static_cast<char*>(std::malloc(csv.size() + 1));
        if (!buf) {
            set_error("out of memory");
            return AMBIT_INVALID_ARGUMENT;
        }
        std::memcpy(buf, csv.data(), csv.size() + 1);
        *out = buf;
        return AMBIT_OK;
    } catch (const std::exception& e) {
        return status_of(e);
    }
}

void ambit_free(char* buffer) { std::free(buffer); }

}  // extern "C"
