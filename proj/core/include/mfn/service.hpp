#pragma once

// HTTP facade over dynamics and analysis. Handlers are pure functions of the
// request body so they can be tested without a socket.

#include "mfn/io.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mfn {

struct ServiceLimits {
    double max_t_end = 30.0; // simulated seconds
    std::size_t max_points = 20000;
    int default_grid_points = 1024;
};

struct Response {
    int status = 200;
    Json body;
};

Response handle_simulate(const Json& request, const ServiceLimits& limits = {});
Response handle_curves(const Json& request, const ServiceLimits& limits = {});
Response handle_classify(const Json& request, const ServiceLimits& limits = {});
Response list_presets();

// Body text to response; malformed JSON maps to 400.
Response dispatch(const std::string& route, const std::string& body, const ServiceLimits& limits = {});

// Indices kept by min-max decimation: per bucket the samples holding the
// minimum and maximum of `y`, in time order. Endpoints always kept.
std::vector<std::size_t> minmax_decimate(const std::vector<double>& y, std::size_t max_points);

// Blocks until the server stops. Returns false when the port cannot be bound.
bool serve(const std::string& host, int port, const ServiceLimits& limits = {});

const std::string& index_page();

} // namespace mfn
