/* Copyright 2026 The flowrt Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the flowrt retargeting library.
 *
 * Every fallible call returns an frt_status. On failure the message is kept
 * per thread and readable through frt_last_error() until the next failing
 * call on that thread. Objects are opaque handles released with their
 * matching *_free function; strings returned through char** are released
 * with frt_string_free. Rasters passed as double arrays are channel-major
 * (C x H x W, row-major within a channel).
 */
#ifndef FLOWRT_FLOWRT_H_
#define FLOWRT_FLOWRT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FLOWRT_BUILDING_LIBRARY)
#    define FRT_API __declspec(dllexport)
#  else
#    define FRT_API __declspec(dllimport)
#  endif
#else
#  define FRT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum frt_status {
  FRT_OK = 0,
  FRT_ERR_INVALID_ARGUMENT = 1,
  FRT_ERR_IO = 2,
  FRT_ERR_FORMAT = 3,
  FRT_ERR_SHAPE = 4,
  FRT_ERR_NUMERIC = 5,
  FRT_ERR_TOPOLOGY = 6,
  FRT_ERR_MISSING = 7,
  FRT_ERR_INTERNAL = 99
} frt_status;

typedef enum frt_metric { FRT_METRIC_GEODESIC = 0, FRT_METRIC_EUCLIDEAN = 1 } frt_metric;

FRT_API const char* frt_version(void);
FRT_API const char* frt_status_name(frt_status status);
/* Message of the last failure on this thread; "" if none. */
FRT_API const char* frt_last_error(void);
FRT_API void frt_string_free(char* s);

/* ---- meshes ---- */

typedef struct frt_mesh frt_mesh;

FRT_API frt_status frt_mesh_load(const char* obj_path, frt_mesh** out);
/* xyz holds 3 * vertex_count values, faces 3 * face_count zero-based indices. */
FRT_API frt_status frt_mesh_create(const double* xyz, size_t vertex_count, const int32_t* faces,
                                   size_t face_count, frt_mesh** out);
FRT_API frt_status frt_mesh_save(const frt_mesh* mesh, const char* obj_path);
FRT_API size_t frt_mesh_vertex_count(const frt_mesh* mesh);
FRT_API size_t frt_mesh_face_count(const frt_mesh* mesh);
/* Copies 3 * vertex_count values into xyz; capacity counts doubles. */
FRT_API frt_status frt_mesh_vertices(const frt_mesh* mesh, double* xyz, size_t capacity);
FRT_API void frt_mesh_free(frt_mesh* mesh);

/* Edge-graph shortest-path distances from `source`; +inf where unreachable.
 * `dist` must hold vertex_count values. */
FRT_API frt_status frt_geodesic_distances(const frt_mesh* mesh, int32_t source, double* dist,
                                          size_t capacity);

/* ---- cameras ---- */

typedef struct frt_camera frt_camera;

FRT_API frt_status frt_camera_load(const char* json_path, frt_camera** out);
/* P is row-major. Pixels map to clip space with y pointing down the image
 * and depth samples are NDC depths. */
FRT_API frt_status frt_camera_create(const double p[16], int width, int height, double near_plane,
                                     double far_plane, frt_camera** out);
FRT_API frt_status frt_camera_unproject(const frt_camera* camera, double x_px, double y_px,
                                        double depth, double world[3]);
/* ndc_depth may be NULL. */
FRT_API frt_status frt_camera_project(const frt_camera* camera, const double world[3],
                                      double pixel[2], double* ndc_depth);
FRT_API void frt_camera_free(frt_camera* camera);

/* ---- controllers and deformation ---- */

typedef struct frt_controllers frt_controllers;

FRT_API frt_status frt_controllers_at_vertices(const frt_mesh* mesh, const int32_t* vertices,
                                               size_t count, frt_controllers** out);
/* Loads a weight file written by frt_run_weights. */
FRT_API frt_status frt_controllers_load(const char* json_path, const frt_mesh* mesh,
                                        frt_controllers** out);
/* k-nearest inverse-square weights. unreachable_pairs may be NULL. */
FRT_API frt_status frt_controllers_compute_weights(frt_controllers* controllers,
                                                   const frt_mesh* mesh, size_t k,
                                                   frt_metric metric, unsigned workers,
                                                   size_t* unreachable_pairs);
FRT_API size_t frt_controllers_count(const frt_controllers* controllers);
/* Nonzero entries of one weight row. *count receives the row length even
 * when it exceeds capacity (then FRT_ERR_SHAPE is returned). */
FRT_API frt_status frt_controllers_weight_row(const frt_controllers* controllers, size_t vertex,
                                              int32_t* controller, double* weight,
                                              size_t capacity, size_t* count);
/* translations holds 3 * controller_count values. */
FRT_API frt_status frt_deform(const frt_mesh* rest, const frt_controllers* controllers,
                              const double* translations, frt_mesh** out);
FRT_API void frt_controllers_free(frt_controllers* controllers);

/* ---- flow files ---- */

typedef struct frt_flow frt_flow;

FRT_API frt_status frt_flow_load(const char* flo_path, frt_flow** out);
/* dxdy is 2 x H x W (dx plane, then dy plane). */
FRT_API frt_status frt_flow_create(const double* dxdy, int width, int height, frt_flow** out);
FRT_API frt_status frt_flow_save(const frt_flow* flow, const char* flo_path);
FRT_API int frt_flow_width(const frt_flow* flow);
FRT_API int frt_flow_height(const frt_flow* flow);
FRT_API frt_status frt_flow_data(const frt_flow* flow, double* dxdy, size_t capacity);
FRT_API void frt_flow_free(frt_flow* flow);

/* ---- warp kernels ---- */

FRT_API frt_status frt_backward_warp(const double* x, int channels, int height, int width,
                                     const frt_flow* flow, double* out);
FRT_API frt_status frt_apply_mask(const double* x, int channels, int height, int width,
                                  const double* mask, double* out);
/* out is C x 2H x 2W. */
FRT_API frt_status frt_upsample2x(const double* x, int channels, int height, int width,
                                  double* out);

/* ---- latent motion ---- */

/* Orthonormalizes n row vectors of length l in place. */
FRT_API frt_status frt_orthonormalize(double* vectors, size_t n, size_t l);
/* z_sd = z_sr + sum_i a[i] * dict_i, dict being n orthonormal rows of length l. */
FRT_API frt_status frt_latent_compose(const double* z_sr, const double* a, const double* dict,
                                      size_t n, size_t l, double* z_sd);

/* ---- losses ---- */

FRT_API frt_status frt_loss_l1(const double* a, const double* b, size_t count, double* out);
FRT_API frt_status frt_loss_smooth(const double* d, const double* d_hat, int height, int width,
                                   double* out);
FRT_API frt_status frt_loss_structure(const double* d, const double* d_hat, int height,
                                      int width, int window, double* out);
/* weights is {rec, sm, sp}; NULL selects the defaults. */
FRT_API frt_status frt_loss_combined(double l_vgg, double l_rec, double l_sm, double l_sp,
                                     const double* weights, double* out);

/* ---- whole runs ----
 * JSON in, JSON out. The returned report is owned by the caller. */

/* Loads a run config, applies `overrides_json` (a JSON merge patch, may be
 * NULL) and returns the validated config with absolute paths. */
FRT_API frt_status frt_resolve_config(const char* config_path, const char* overrides_json,
                                      char** resolved_json);
FRT_API frt_status frt_run_weights(const char* config_json, const char* out_path, char** report);
FRT_API frt_status frt_run_retarget(const char* config_json, char** diagnostics);
/* Relative paths in the request resolve against base_dir. */
FRT_API frt_status frt_run_warp(const char* request_json, const char* base_dir, char** summary);
FRT_API frt_status frt_run_loss(const char* request_json, const char* base_dir, char** report);
FRT_API frt_status frt_generate_fixtures(const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* FLOWRT_FLOWRT_H_ */
