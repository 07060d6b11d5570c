// Copyright 2025 The Oxel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "oxel/image.hpp"
#include "oxel/rng.hpp"
#include "oxel/viewgen.hpp"

namespace oxel {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const;
    Vec3 normalized() const;
};

/// Unit quaternion rotation (w, x, y, z).
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;

    double norm() const;
    Quat normalized() const;
    Quat conjugate() const { return {w, -x, -y, -z}; }
    Vec3 rotate(const Vec3& v) const;

    static Quat from_axis_angle(const Vec3& axis, double angle);
    /// Orientation looking from `eye` toward `target`; camera looks along -z,
    /// +y is the image-up direction, `up` the world up hint.
    static Quat look_at(const Vec3& eye, const Vec3& target, const Vec3& up);
};

enum class PrimitiveKind { sphere, box, cylinder };

struct Primitive {
    PrimitiveKind kind = PrimitiveKind::sphere;
    Vec3 position;
    Quat rotation;
    Vec3 size;  // sphere: radius in x; box: full extents; cylinder: radius x, full height z
    int texture_id = 1;

    double bounding_radius() const;
};

/// Box room centered at the origin with textured inside walls, plus objects
/// strictly inside, lit by one directional light.
struct SceneSpec {
    Vec3 room_size{6, 6, 6};  // full extents
    std::vector<Primitive> objects;
    Vec3 light_dir{0, 0, 1};  // unit vector pointing toward the light

    void validate() const;
    bool position_inside_room(const Vec3& p, double margin = 0.0) const;
};

struct CameraPose {
    Vec3 position;
    Quat orientation;
    double vfov = 70.0 * 3.14159265358979323846 / 180.0;
    int height = 64, width = 64;

    void validate(const SceneSpec& scene) const;
    /// World-space ray direction through the center of pixel (row, col).
    Vec3 pixel_ray(int row, int col) const;
    /// Continuous pixel coordinates (x=col, y=row) of a world point; false if
    /// the point lies behind the camera.
    bool project(const Vec3& p, double& px, double& py) const;
};

struct RayHit {
    Vec3 point;
    Vec3 normal;
    int object_id = 0;  // 0 = room walls, 1..N = scene objects
    double distance = 0.0;
};

struct RenderResult {
    Image image;                // H x W x 3
    std::vector<RayHit> hits;   // row-major, one per pixel
};

/// Nearest hit along origin+t*dir over the room interior and all objects.
RayHit trace_ray(const SceneSpec& scene, const Vec3& origin, const Vec3& dir);

/// Per-pixel primary-ray render: albedo * max(0, n.l) + 0.2 ambient, clipped.
/// Every pixel hits something (the room walls close the scene).
RenderResult render(const SceneSpec& scene, const CameraPose& cam);

/// Projects every view-1 hit point into cam2 and keeps a correspondence when
/// (a) the rounded target pixel is in bounds, (b) re-tracing from cam2 toward
/// the point lands within epsilon (occlusion test), and (c) the target
/// pixel's own hit reprojects into cam1 within one pixel of the source.
CorrespondenceMap match_pixels(const SceneSpec& scene, const CameraPose& cam1,
                               const CameraPose& cam2, const std::vector<RayHit>& hits1,
                               const std::vector<RayHit>& hits2, double epsilon);

struct SceneSampleConfig {
    int resolution = 64;
    double epsilon = 0.01;           // meters
    double min_mutual_visibility = 0.2;
    int max_attempts = 1000;
};

/// Random room, objects and a camera pair whose views overlap.
std::tuple<SceneSpec, CameraPose, CameraPose> sample_scene(Rng& rng,
                                                           const SceneSampleConfig& cfg = {});

// --- pair records on disk: two PNGs plus a binary correspondence file ---

struct PairRecordPaths {
    std::string image1, image2, corr;
};
PairRecordPaths pair_record_paths(const std::string& dir, int index);

/// "OXCR" | u32 H | u32 W | per pixel: i32 target row, i32 target col, u8 valid.
/// Little-endian, row-major.
void write_correspondence(const std::string& path, const CorrespondenceMap& corr);
CorrespondenceMap read_correspondence(const std::string& path);

}  // namespace oxel
