// Copyright 2026 The flowrt Authors
// SPDX-License-Identifier: Apache-2.0

#include "flowrt/flowrt.h"

#include <cstdlib>
#include <fstream>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "flowrt/camera.hpp"
#include "flowrt/config.hpp"
#include "flowrt/controllers.hpp"
#include "flowrt/error.hpp"
#include "flowrt/fixtures.hpp"
#include "flowrt/flo_io.hpp"
#include "flowrt/geodesic.hpp"
#include "flowrt/latent.hpp"
#include "flowrt/linalg.hpp"
#include "flowrt/losses.hpp"
#include "flowrt/mesh.hpp"
#include "flowrt/pipeline.hpp"
#include "flowrt/retarget.hpp"
#include "flowrt/warp.hpp"

struct frt_mesh {
  flowrt::Mesh mesh;
};
struct frt_camera {
  flowrt::PerspectiveCamera camera;
};
struct frt_controllers {
  flowrt::ControllerSet set;
};
struct frt_flow {
  flowrt::FlowField flow;
};

namespace {

thread_local std::string g_last_error;

frt_status record(frt_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

frt_status to_status(flowrt::ErrorCode code) {
  switch (code) {
    case flowrt::ErrorCode::kInvalidArgument: return FRT_ERR_INVALID_ARGUMENT;
    case flowrt::ErrorCode::kIo: return FRT_ERR_IO;
    case flowrt::ErrorCode::kFormat: return FRT_ERR_FORMAT;
    case flowrt::ErrorCode::kShape: return FRT_ERR_SHAPE;
    case flowrt::ErrorCode::kNumeric: return FRT_ERR_NUMERIC;
    case flowrt::ErrorCode::kTopology: return FRT_ERR_TOPOLOGY;
    case flowrt::ErrorCode::kMissing: return FRT_ERR_MISSING;
  }
  return FRT_ERR_INTERNAL;
}

template <typename Fn>
frt_status guard(Fn&& fn) {
  try {
    fn();
    return FRT_OK;
  } catch (const flowrt::Error& e) {
    return record(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return record(FRT_ERR_FORMAT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return record(FRT_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return record(FRT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(FRT_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) flowrt::fail(flowrt::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

void need_capacity(std::size_t have, std::size_t want) {
  if (have < want) {
    flowrt::fail(flowrt::ErrorCode::kShape, "buffer holds " + std::to_string(have) + " values, " +
                                                std::to_string(want) + " needed");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void hand_out(const nlohmann::json& j, char** out) {
  if (out != nullptr) *out = dup_string(j.dump(2));
}

flowrt::FeatureMap map_from(const double* x, int c, int h, int w) {
  need(x, "input raster");
  if (c < 1 || h < 1 || w < 1) flowrt::fail(flowrt::ErrorCode::kShape, "raster dimensions must be positive");
  flowrt::FeatureMap m(c, h, w);
  std::copy(x, x + m.size(), m.data().begin());
  return m;
}

void copy_out(const flowrt::FeatureMap& m, double* out) {
  need(out, "output buffer");
  std::copy(m.data().begin(), m.data().end(), out);
}

flowrt::RunConfig parse_config(const char* config_json) {
  need(config_json, "config");
  return flowrt::RunConfig::from_json(nlohmann::json::parse(config_json));
}

}  // namespace

extern "C" {

const char* frt_version(void) { return FLOWRT_VERSION; }

const char* frt_status_name(frt_status status) {
  switch (status) {
    case FRT_OK: return "ok";
    case FRT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FRT_ERR_IO: return "io";
    case FRT_ERR_FORMAT: return "format";
    case FRT_ERR_SHAPE: return "shape";
    case FRT_ERR_NUMERIC: return "numeric";
    case FRT_ERR_TOPOLOGY: return "topology";
    case FRT_ERR_MISSING: return "missing";
    case FRT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* frt_last_error(void) { return g_last_error.c_str(); }

void frt_string_free(char* s) { std::free(s); }

frt_status frt_mesh_load(const char* obj_path, frt_mesh** out) {
  return guard([&] {
    need(obj_path, "path");
    need(out, "out");
    *out = new frt_mesh{flowrt::read_obj(obj_path)};
  });
}

frt_status frt_mesh_create(const double* xyz, size_t vertex_count, const int32_t* faces,
                           size_t face_count, frt_mesh** out) {
  return guard([&] {
    need(out, "out");
    if (vertex_count > 0) need(xyz, "xyz");
    if (face_count > 0) need(faces, "faces");
    flowrt::Mesh mesh;
    for (std::size_t i = 0; i < vertex_count; ++i) {
      mesh.vertices.emplace_back(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
    }
    for (std::size_t f = 0; f < face_count; ++f) {
      mesh.faces.push_back({faces[3 * f], faces[3 * f + 1], faces[3 * f + 2]});
    }
    mesh.validate();
    *out = new frt_mesh{std::move(mesh)};
  });
}

frt_status frt_mesh_save(const frt_mesh* mesh, const char* obj_path) {
  return guard([&] {
    need(mesh, "mesh");
    need(obj_path, "path");
    flowrt::write_obj(mesh->mesh, obj_path);
  });
}

size_t frt_mesh_vertex_count(const frt_mesh* mesh) { return mesh ? mesh->mesh.vertex_count() : 0; }

size_t frt_mesh_face_count(const frt_mesh* mesh) { return mesh ? mesh->mesh.face_count() : 0; }

frt_status frt_mesh_vertices(const frt_mesh* mesh, double* xyz, size_t capacity) {
  return guard([&] {
    need(mesh, "mesh");
    need(xyz, "xyz");
    need_capacity(capacity, 3 * mesh->mesh.vertex_count());
    for (const auto& v : mesh->mesh.vertices) {
      *xyz++ = v.x();
      *xyz++ = v.y();
      *xyz++ = v.z();
    }
  });
}

void frt_mesh_free(frt_mesh* mesh) { delete mesh; }

frt_status frt_geodesic_distances(const frt_mesh* mesh, int32_t source, double* dist,
                                  size_t capacity) {
  return guard([&] {
    need(mesh, "mesh");
    need(dist, "dist");
    need_capacity(capacity, mesh->mesh.vertex_count());
    const auto field = flowrt::geodesic_distances(mesh->mesh, source);
    std::copy(field.dist.begin(), field.dist.end(), dist);
  });
}

frt_status frt_camera_load(const char* json_path, frt_camera** out) {
  return guard([&] {
    need(json_path, "path");
    need(out, "out");
    *out = new frt_camera{flowrt::PerspectiveCamera::load(json_path)};
  });
}

frt_status frt_camera_create(const double p[16], int width, int height, double near_plane,
                             double far_plane, frt_camera** out) {
  return guard([&] {
    need(p, "P");
    need(out, "out");
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) = p[4 * r + c];
    }
    *out = new frt_camera{flowrt::PerspectiveCamera(m, width, height, near_plane, far_plane)};
  });
}

frt_status frt_camera_unproject(const frt_camera* camera, double x_px, double y_px, double depth,
                                double world[3]) {
  return guard([&] {
    need(camera, "camera");
    need(world, "world");
    const auto p = camera->camera.unproject({x_px, y_px}, depth);
    world[0] = p.x();
    world[1] = p.y();
    world[2] = p.z();
  });
}

frt_status frt_camera_project(const frt_camera* camera, const double world[3], double pixel[2],
                              double* ndc_depth) {
  return guard([&] {
    need(camera, "camera");
    need(world, "world");
    need(pixel, "pixel");
    const auto p = camera->camera.project({world[0], world[1], world[2]});
    pixel[0] = p.pixel.x();
    pixel[1] = p.pixel.y();
    if (ndc_depth != nullptr) *ndc_depth = p.ndc_depth;
  });
}

void frt_camera_free(frt_camera* camera) { delete camera; }

frt_status frt_controllers_at_vertices(const frt_mesh* mesh, const int32_t* vertices, size_t count,
                                       frt_controllers** out) {
  return guard([&] {
    need(mesh, "mesh");
    need(out, "out");
    if (count > 0) need(vertices, "vertices");
    *out = new frt_controllers{
        flowrt::controllers_at_vertices(mesh->mesh, std::span<const int32_t>(vertices, count))};
  });
}

frt_status frt_controllers_load(const char* json_path, const frt_mesh* mesh, frt_controllers** out) {
  return guard([&] {
    need(json_path, "path");
    need(mesh, "mesh");
    need(out, "out");
    std::ifstream in(json_path);
    if (!in) flowrt::fail(flowrt::ErrorCode::kIo, std::string("cannot open ") + json_path);
    *out = new frt_controllers{
        flowrt::controllers_from_json(nlohmann::json::parse(in), mesh->mesh.vertex_count())};
  });
}

frt_status frt_controllers_compute_weights(frt_controllers* controllers, const frt_mesh* mesh,
                                           size_t k, frt_metric metric, unsigned workers,
                                           size_t* unreachable_pairs) {
  return guard([&] {
    need(controllers, "controllers");
    need(mesh, "mesh");
    if (metric != FRT_METRIC_GEODESIC && metric != FRT_METRIC_EUCLIDEAN) {
      flowrt::fail(flowrt::ErrorCode::kInvalidArgument, "unknown metric");
    }
    const auto report = flowrt::compute_controlling_weights(
        mesh->mesh, controllers->set,
        {k,
         metric == FRT_METRIC_GEODESIC ? flowrt::DistanceMetric::kGeodesic
                                       : flowrt::DistanceMetric::kEuclidean,
         workers});
    if (unreachable_pairs != nullptr) *unreachable_pairs = report.unreachable_pairs;
  });
}

size_t frt_controllers_count(const frt_controllers* controllers) {
  return controllers ? controllers->set.size() : 0;
}

frt_status frt_controllers_weight_row(const frt_controllers* controllers, size_t vertex,
                                      int32_t* controller, double* weight, size_t capacity,
                                      size_t* count) {
  return guard([&] {
    need(controllers, "controllers");
    need(count, "count");
    const auto& w = controllers->set.weights;
    if (vertex >= w.rows()) flowrt::fail(flowrt::ErrorCode::kInvalidArgument, "vertex out of range");
    const auto row = w.row(vertex);
    *count = row.size();
    need_capacity(capacity, row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (controller != nullptr) controller[i] = row[i].controller;
      if (weight != nullptr) weight[i] = row[i].weight;
    }
  });
}

frt_status frt_deform(const frt_mesh* rest, const frt_controllers* controllers,
                      const double* translations, frt_mesh** out) {
  return guard([&] {
    need(rest, "rest");
    need(controllers, "controllers");
    need(out, "out");
    const std::size_t n = controllers->set.size();
    if (n > 0) need(translations, "translations");
    std::vector<flowrt::ControllerTransform> t(n);
    for (std::size_t j = 0; j < n; ++j) {
      t[j].controller = static_cast<std::int32_t>(j);
      t[j].translation = {translations[3 * j], translations[3 * j + 1], translations[3 * j + 2]};
    }
    *out = new frt_mesh{flowrt::deform_mesh(rest->mesh, controllers->set, t)};
  });
}

void frt_controllers_free(frt_controllers* controllers) { delete controllers; }

frt_status frt_flow_load(const char* flo_path, frt_flow** out) {
  return guard([&] {
    need(flo_path, "path");
    need(out, "out");
    *out = new frt_flow{flowrt::read_flo(flo_path)};
  });
}

frt_status frt_flow_create(const double* dxdy, int width, int height, frt_flow** out) {
  return guard([&] {
    need(out, "out");
    *out = new frt_flow{flowrt::FlowField(map_from(dxdy, 2, height, width))};
  });
}

frt_status frt_flow_save(const frt_flow* flow, const char* flo_path) {
  return guard([&] {
    need(flow, "flow");
    need(flo_path, "path");
    flowrt::write_flo(flow->flow, flo_path);
  });
}

int frt_flow_width(const frt_flow* flow) { return flow ? flow->flow.width() : 0; }

int frt_flow_height(const frt_flow* flow) { return flow ? flow->flow.height() : 0; }

frt_status frt_flow_data(const frt_flow* flow, double* dxdy, size_t capacity) {
  return guard([&] {
    need(flow, "flow");
    need_capacity(capacity, flow->flow.map().size());
    copy_out(flow->flow.map(), dxdy);
  });
}

void frt_flow_free(frt_flow* flow) { delete flow; }

frt_status frt_backward_warp(const double* x, int channels, int height, int width,
                             const frt_flow* flow, double* out) {
  return guard([&] {
    need(flow, "flow");
    copy_out(flowrt::backward_warp(map_from(x, channels, height, width), flow->flow), out);
  });
}

frt_status frt_apply_mask(const double* x, int channels, int height, int width, const double* mask,
                          double* out) {
  return guard([&] {
    copy_out(flowrt::apply_mask(map_from(x, channels, height, width), map_from(mask, 1, height, width)),
             out);
  });
}

frt_status frt_upsample2x(const double* x, int channels, int height, int width, double* out) {
  return guard([&] { copy_out(flowrt::upsample2x(map_from(x, channels, height, width)), out); });
}

frt_status frt_orthonormalize(double* vectors, size_t n, size_t l) {
  return guard([&] {
    need(vectors, "vectors");
    std::vector<std::vector<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i].assign(vectors + i * l, vectors + (i + 1) * l);
    flowrt::modified_gram_schmidt(v);
    for (std::size_t i = 0; i < n; ++i) std::copy(v[i].begin(), v[i].end(), vectors + i * l);
  });
}

frt_status frt_latent_compose(const double* z_sr, const double* a, const double* dict, size_t n,
                              size_t l, double* z_sd) {
  return guard([&] {
    need(z_sr, "z_sr");
    need(a, "a");
    need(dict, "dict");
    need(z_sd, "z_sd");
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i].assign(dict + i * l, dict + (i + 1) * l);
    const auto d = flowrt::MotionDictionary::orthonormalize(std::move(rows));
    const auto w = flowrt::compose_path(std::span<const double>(a, n), d);
    const flowrt::LatentCode src{flowrt::LatentRole::kSourceToReference,
                                 std::vector<double>(z_sr, z_sr + l)};
    const auto z = flowrt::compose_code(src, w);
    std::copy(z.values.begin(), z.values.end(), z_sd);
  });
}

frt_status frt_loss_l1(const double* a, const double* b, size_t count, double* out) {
  return guard([&] {
    need(out, "out");
    if (count > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
      flowrt::fail(flowrt::ErrorCode::kShape, "too many values");
    }
    const int n = static_cast<int>(count);
    *out = flowrt::l1_loss(map_from(a, 1, 1, n), map_from(b, 1, 1, n));
  });
}

frt_status frt_loss_smooth(const double* d, const double* d_hat, int height, int width, double* out) {
  return guard([&] {
    need(out, "out");
    *out = flowrt::smooth_loss(map_from(d, 1, height, width), map_from(d_hat, 1, height, width));
  });
}

frt_status frt_loss_structure(const double* d, const double* d_hat, int height, int width,
                              int window, double* out) {
  return guard([&] {
    need(out, "out");
    *out = flowrt::structure_preserve_loss(map_from(d, 1, height, width),
                                           map_from(d_hat, 1, height, width), window);
  });
}

frt_status frt_loss_combined(double l_vgg, double l_rec, double l_sm, double l_sp,
                             const double* weights, double* out) {
  return guard([&] {
    need(out, "out");
    flowrt::LossWeights w;
    if (weights != nullptr) w = {weights[0], weights[1], weights[2]};
    *out = flowrt::combined_loss(l_vgg, l_rec, l_sm, l_sp, w);
  });
}

frt_status frt_resolve_config(const char* config_path, const char* overrides_json,
                              char** resolved_json) {
  return guard([&] {
    need(config_path, "config path");
    need(resolved_json, "out");
    const std::filesystem::path path = std::filesystem::absolute(config_path);
    std::ifstream in(path);
    if (!in) flowrt::fail(flowrt::ErrorCode::kIo, "cannot open " + path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      flowrt::fail(flowrt::ErrorCode::kFormat, path.string() + ": " + e.what());
    }
    if (overrides_json != nullptr && *overrides_json != '\0') {
      j.merge_patch(nlohmann::json::parse(overrides_json));
    }
    const auto cfg = flowrt::RunConfig::from_json(j, path.parent_path());
    cfg.validate();
    *resolved_json = dup_string(cfg.to_json().dump(2));
  });
}

frt_status frt_run_weights(const char* config_json, const char* out_path, char** report) {
  return guard([&] {
    const auto cfg = parse_config(config_json);
    hand_out(flowrt::run_weights(cfg, out_path ? out_path : ""), report);
  });
}

frt_status frt_run_retarget(const char* config_json, char** diagnostics) {
  return guard([&] { hand_out(flowrt::run_retarget(parse_config(config_json)), diagnostics); });
}

frt_status frt_run_warp(const char* request_json, const char* base_dir, char** summary) {
  return guard([&] {
    need(request_json, "request");
    hand_out(flowrt::run_warp(nlohmann::json::parse(request_json), base_dir ? base_dir : ""),
             summary);
  });
}

frt_status frt_run_loss(const char* request_json, const char* base_dir, char** report) {
  return guard([&] {
    need(request_json, "request");
    hand_out(flowrt::run_loss(nlohmann::json::parse(request_json), base_dir ? base_dir : ""),
             report);
  });
}

frt_status frt_generate_fixtures(const char* dir) {
  return guard([&] {
    need(dir, "dir");
    flowrt::generate_fixtures(dir);
  });
}

}  // extern "C"
