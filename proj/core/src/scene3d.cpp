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

#include "oxel/scene3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace oxel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRayEps = 1e-9;

uint64_t hash3(int64_t x, int64_t y, int64_t z, uint64_t salt) {
    uint64_t h = salt * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<uint64_t>(x) * 0xd6e8feb86659fd93ULL;
    h = (h ^ (h >> 32)) * 0xff51afd7ed558ccdULL;
    h ^= static_cast<uint64_t>(y) * 0xc4ceb9fe1a85ec53ULL;
    h = (h ^ (h >> 32)) * 0x94d049bb133111ebULL;
    h ^= static_cast<uint64_t>(z) * 0xbf58476d1ce4e5b9ULL;
    return h ^ (h >> 33);
}

double hash_unit(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Two-tone checker with a per-id hue; local coordinates keep the pattern
/// attached to the surface across views.
std::array<float, 3> albedo_at(int texture_id, const Vec3& local) {
    const double cell = 0.35;
    const int64_t ix = static_cast<int64_t>(std::floor(local.x / cell));
    const int64_t iy = static_cast<int64_t>(std::floor(local.y / cell));
    const int64_t iz = static_cast<int64_t>(std::floor(local.z / cell));
    const bool parity = ((ix + iy + iz) & 1) != 0;
    const uint64_t salt = static_cast<uint64_t>(texture_id) + 17;
    const double hue = hash_unit(hash3(texture_id, 3, 7, salt));
    const double jitter = 0.15 * hash_unit(hash3(ix, iy, iz, salt));
    auto base = hsv_to_rgb({static_cast<float>(hue),
                            parity ? 0.75f : 0.35f,
                            static_cast<float>((parity ? 0.85 : 0.55) + jitter)});
    return base;
}

struct LocalRay {
    Vec3 o, d;
};

LocalRay to_local(const Primitive& prim, const Vec3& origin, const Vec3& dir) {
    const Quat inv = prim.rotation.conjugate();
    return {inv.rotate(origin - prim.position), inv.rotate(dir)};
}

/// Returns smallest t > kRayEps or infinity. Normal is in local frame.
double intersect_sphere(const Primitive& p, const LocalRay& r, Vec3& n_local) {
    const double radius = p.size.x;
    const double b = r.o.dot(r.d);
    const double c = r.o.dot(r.o) - radius * radius;
    const double disc = b * b - c;
    if (disc < 0) return kInf;
    const double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t <= kRayEps) t = -b + sq;
    if (t <= kRayEps) return kInf;
    n_local = (r.o + r.d * t).normalized();
    return t;
}

double intersect_box(const Primitive& p, const LocalRay& r, Vec3& n_local) {
    const Vec3 h{p.size.x / 2, p.size.y / 2, p.size.z / 2};
    double tmin = -kInf, tmax = kInf;
    int axis = -1;
    const double o[3] = {r.o.x, r.o.y, r.o.z};
    const double d[3] = {r.d.x, r.d.y, r.d.z};
    const double hh[3] = {h.x, h.y, h.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-12) {
            if (std::abs(o[a]) > hh[a]) return kInf;
            continue;
        }
        double t0 = (-hh[a] - o[a]) / d[a];
        double t1 = (hh[a] - o[a]) / d[a];
        if (t0 > t1) std::swap(t0, t1);
        if (t0 > tmin) {
            tmin = t0;
            axis = a;
        }
        tmax = std::min(tmax, t1);
        if (tmin > tmax) return kInf;
    }
    if (tmin <= kRayEps || axis < 0) return kInf;  // inside or behind
    n_local = {0, 0, 0};
    const double sign = d[axis] > 0 ? -1.0 : 1.0;
    if (axis == 0) n_local.x = sign;
    if (axis == 1) n_local.y = sign;
    if (axis == 2) n_local.z = sign;
    return tmin;
}

double intersect_cylinder(const Primitive& p, const LocalRay& r, Vec3& n_local) {
    const double radius = p.size.x;
    const double hh = p.size.z / 2;
    double best = kInf;
    Vec3 bn;
    // lateral surface
    const double a = r.d.x * r.d.x + r.d.y * r.d.y;
    if (a > 1e-14) {
        const double b = r.o.x * r.d.x + r.o.y * r.d.y;
        const double c = r.o.x * r.o.x + r.o.y * r.o.y - radius * radius;
        const double disc = b * b - a * c;
        if (disc >= 0) {
            const double sq = std::sqrt(disc);
            for (double t : {(-b - sq) / a, (-b + sq) / a}) {
                if (t <= kRayEps || t >= best) continue;
                const double z = r.o.z + t * r.d.z;
                if (std::abs(z) <= hh) {
                    best = t;
                    const Vec3 q = r.o + r.d * t;
                    bn = Vec3{q.x, q.y, 0}.normalized();
                }
            }
        }
    }
    // caps
    if (std::abs(r.d.z) > 1e-12) {
        for (double zcap : {hh, -hh}) {
            const double t = (zcap - r.o.z) / r.d.z;
            if (t <= kRayEps || t >= best) continue;
            const Vec3 q = r.o + r.d * t;
            if (q.x * q.x + q.y * q.y <= radius * radius) {
                best = t;
                bn = {0, 0, zcap > 0 ? 1.0 : -1.0};
            }
        }
    }
    n_local = bn;
    return best;
}

/// Exit intersection with the room interior (origin assumed inside).
double intersect_room(const SceneSpec& scene, const Vec3& o, const Vec3& d, Vec3& normal) {
    const double h[3] = {scene.room_size.x / 2, scene.room_size.y / 2, scene.room_size.z / 2};
    const double oo[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    double best = kInf;
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dd[a]) < 1e-12) continue;
        const double wall = dd[a] > 0 ? h[a] : -h[a];
        const double t = (wall - oo[a]) / dd[a];
        if (t > kRayEps && t < best) {
            best = t;
            axis = a;
        }
    }
    if (axis < 0) return kInf;
    normal = {0, 0, 0};
    const double sign = dd[axis] > 0 ? -1.0 : 1.0;  // walls face inward
    if (axis == 0) normal.x = sign;
    if (axis == 1) normal.y = sign;
    if (axis == 2) normal.z = sign;
    return best;
}

}  // namespace

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 Vec3::normalized() const {
    const double n = norm();
    OXEL_CHECK(n > 1e-12, "cannot normalize zero vector");
    return {x / n, y / n, z / n};
}

double Quat::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quat Quat::normalized() const {
    const double n = norm();
    OXEL_CHECK(n > 1e-12, "cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

Vec3 Quat::rotate(const Vec3& v) const {
    // q v q^-1 expanded
    const Vec3 u{x, y, z};
    const Vec3 t = u.cross(v) * 2.0;
    return v + t * w + u.cross(t);
}

Quat Quat::from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 a = axis.normalized();
    const double s = std::sin(angle / 2);
    return Quat{std::cos(angle / 2), a.x * s, a.y * s, a.z * s};
}

Quat Quat::look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
    const Vec3 f = (target - eye).normalized();   // camera -z
    Vec3 r = f.cross(up);
    if (r.norm() < 1e-9) r = f.cross(Vec3{0, 1, 0});
    r = r.normalized();
    const Vec3 u = r.cross(f);
    // rotation matrix columns: x->r, y->u, z->-f
    const double m00 = r.x, m01 = u.x, m02 = -f.x;
    const double m10 = r.y, m11 = u.y, m12 = -f.y;
    const double m20 = r.z, m21 = u.z, m22 = -f.z;
    const double tr = m00 + m11 + m22;
    Quat q;
    if (tr > 0) {
        double s = std::sqrt(tr + 1.0) * 2;
        q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
    } else if (m00 > m11 && m00 > m22) {
        double s = std::sqrt(1.0 + m00 - m11 - m22) * 2;
        q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
    } else if (m11 > m22) {
        double s = std::sqrt(1.0 + m11 - m00 - m22) * 2;
        q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
    } else {
        double s = std::sqrt(1.0 + m22 - m00 - m11) * 2;
        q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
    }
    return q.normalized();
}

double Primitive::bounding_radius() const {
    switch (kind) {
        case PrimitiveKind::sphere: return size.x;
        case PrimitiveKind::box:
            return 0.5 * std::sqrt(size.x * size.x + size.y * size.y + size.z * size.z);
        case PrimitiveKind::cylinder:
            return std::sqrt(size.x * size.x + size.z * size.z / 4);
    }
    return 0.0;
}

void SceneSpec::validate() const {
    OXEL_CHECK_CONFIG(room_size.x > 0 && room_size.y > 0 && room_size.z > 0,
                      "scene: room dimensions must be positive");
    OXEL_CHECK_CONFIG(!objects.empty(), "scene: at least one object required");
    for (const auto& obj : objects) {
        const double r = obj.bounding_radius();
        OXEL_CHECK_CONFIG(position_inside_room(obj.position, r),
                          "scene: object bounding volume must lie strictly inside the room");
    }
    OXEL_CHECK_CONFIG(std::abs(light_dir.norm() - 1.0) < 1e-6,
                      "scene: light direction must be a unit vector");
}

bool SceneSpec::position_inside_room(const Vec3& p, double margin) const {
    return std::abs(p.x) < room_size.x / 2 - margin &&
           std::abs(p.y) < room_size.y / 2 - margin &&
           std::abs(p.z) < room_size.z / 2 - margin;
}

void CameraPose::validate(const SceneSpec& scene) const {
    OXEL_CHECK_CONFIG(std::abs(orientation.norm() - 1.0) < 1e-6,
                      "camera: quaternion must be unit length");
    OXEL_CHECK_CONFIG(scene.position_inside_room(position),
                      "camera: position must be inside the room");
    OXEL_CHECK_CONFIG(vfov > 0 && vfov < 3.1, "camera: vertical fov out of range");
    OXEL_CHECK_CONFIG(height >= 1 && width >= 1, "camera: bad resolution");
}

Vec3 CameraPose::pixel_ray(int row, int col) const {
    const double s = std::tan(vfov / 2) / (height / 2.0);
    const double xn = (col + 0.5 - width / 2.0) * s;
    const double yn = -(row + 0.5 - height / 2.0) * s;
    return orientation.rotate(Vec3{xn, yn, -1}.normalized());
}

bool CameraPose::project(const Vec3& p, double& px, double& py) const {
    const Vec3 pc = orientation.conjugate().rotate(p - position);
    if (pc.z >= -1e-9) return false;
    const double s = std::tan(vfov / 2) / (height / 2.0);
    const double xn = pc.x / (-pc.z);
    const double yn = pc.y / (-pc.z);
    px = xn / s + width / 2.0 - 0.5;
    py = -yn / s + height / 2.0 - 0.5;
    return true;
}

RayHit trace_ray(const SceneSpec& scene, const Vec3& origin, const Vec3& dir) {
    Vec3 normal;
    double best = intersect_room(scene, origin, dir, normal);
    int id = 0;
    for (size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = scene.objects[i];
        const LocalRay lr = to_local(obj, origin, dir);
        Vec3 nl;
        double t = kInf;
        switch (obj.kind) {
            case PrimitiveKind::sphere: t = intersect_sphere(obj, lr, nl); break;
            case PrimitiveKind::box: t = intersect_box(obj, lr, nl); break;
            case PrimitiveKind::cylinder: t = intersect_cylinder(obj, lr, nl); break;
        }
        if (t < best) {
            best = t;
            id = static_cast<int>(i) + 1;
            normal = obj.rotation.rotate(nl);
        }
    }
    OXEL_CHECK(std::isfinite(best), "trace_ray: ray escaped the room");
    RayHit hit;
    hit.distance = best;
    hit.point = origin + dir * best;
    hit.normal = normal;
    hit.object_id = id;
    return hit;
}

RenderResult render(const SceneSpec& scene, const CameraPose& cam) {
    scene.validate();
    cam.validate(scene);
    RenderResult out;
    out.image = Image(cam.height, cam.width, 3);
    out.hits.resize(static_cast<size_t>(cam.height) * cam.width);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Vec3 dir = cam.pixel_ray(y, x);
            const RayHit hit = trace_ray(scene, cam.position, dir);
            out.hits[static_cast<size_t>(y) * cam.width + x] = hit;

            Vec3 local;
            int tex;
            if (hit.object_id == 0) {
                local = hit.point;  // wall pattern anchored in world space
                tex = 0;
            } else {
                const auto& obj = scene.objects[static_cast<size_t>(hit.object_id - 1)];
                local = obj.rotation.conjugate().rotate(hit.point - obj.position);
                tex = obj.texture_id;
            }
            const auto alb = albedo_at(tex, local);
            const double diffuse = std::max(0.0, hit.normal.dot(scene.light_dir));
            for (int c = 0; c < 3; ++c)
                out.image.at(y, x, c) =
                    static_cast<float>(std::clamp(alb[c] * diffuse + 0.2, 0.0, 1.0));
        }
    }
    return out;
}

CorrespondenceMap match_pixels(const SceneSpec& scene, const CameraPose& cam1,
                               const CameraPose& cam2, const std::vector<RayHit>& hits1,
                               const std::vector<RayHit>& hits2, double epsilon) {
    OXEL_CHECK_CONFIG(epsilon > 0.0, "match_pixels: epsilon must be positive");
    OXEL_CHECK(hits1.size() == static_cast<size_t>(cam1.height) * cam1.width &&
                   hits2.size() == static_cast<size_t>(cam2.height) * cam2.width,
               "match_pixels: hit buffers do not match camera resolutions");
    CorrespondenceMap map;
    map.height = cam1.height;
    map.width = cam1.width;
    const size_t n = hits1.size();
    map.tx.assign(n, 0);
    map.ty.assign(n, 0);
    map.valid.assign(n, 0);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < cam1.height; ++y) {
        for (int x = 0; x < cam1.width; ++x) {
            const size_t i = static_cast<size_t>(y) * cam1.width + x;
            const Vec3 p = hits1[i].point;
            double px, py;
            if (!cam2.project(p, px, py)) continue;
            const int qx = static_cast<int>(std::lround(px));
            const int qy = static_cast<int>(std::lround(py));
            map.tx[i] = qx;
            map.ty[i] = qy;
            if (qx < 0 || qx >= cam2.width || qy < 0 || qy >= cam2.height) continue;

            // occlusion: re-trace from the second camera toward the point
            const Vec3 diff = p - cam2.position;
            const double dist = diff.norm();
            if (dist < 1e-9) continue;
            const RayHit back = trace_ray(scene, cam2.position, diff * (1.0 / dist));
            if ((back.point - p).norm() > epsilon) continue;

            // symmetric check keeps matches consistent in both directions
            const Vec3 p2 = hits2[static_cast<size_t>(qy) * cam2.width + qx].point;
            double rx, ry;
            if (!cam1.project(p2, rx, ry)) continue;
            if (std::abs(rx - x) > 1.0 || std::abs(ry - y) > 1.0) continue;

            map.valid[i] = 1;
        }
    }
    return map;
}

std::tuple<SceneSpec, CameraPose, CameraPose> sample_scene(Rng& rng,
                                                           const SceneSampleConfig& cfg) {
    auto sample_unit_vector = [&rng]() {
        while (true) {
            const Vec3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const double n = v.norm();
            if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
        }
    };
    auto sample_quat = [&rng]() {
        // uniform over SO(3)
        const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        const double a = std::sqrt(1 - u1), b = std::sqrt(u1);
        const double pi2 = 2 * 3.14159265358979323846;
        return Quat{a * std::sin(pi2 * u2), a * std::cos(pi2 * u2), b * std::sin(pi2 * u3),
                    b * std::cos(pi2 * u3)}
            .normalized();
    };

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        SceneSpec scene;
        scene.room_size = {rng.uniform(4, 8), rng.uniform(4, 8), rng.uniform(4, 8)};
        const int n_obj = 3 + static_cast<int>(rng.uniform_int(6));
        bool placed_all = true;
        for (int i = 0; i < n_obj; ++i) {
            Primitive prim;
            const int kind = static_cast<int>(rng.uniform_int(3));
            prim.kind = static_cast<PrimitiveKind>(kind);
            switch (prim.kind) {
                case PrimitiveKind::sphere:
                    prim.size = {rng.uniform(0.25, 0.6), 0, 0};
                    break;
                case PrimitiveKind::box:
                    prim.size = {rng.uniform(0.4, 1.2), rng.uniform(0.4, 1.2),
                                 rng.uniform(0.4, 1.2)};
                    break;
                case PrimitiveKind::cylinder:
                    prim.size = {rng.uniform(0.2, 0.5), 0, rng.uniform(0.4, 1.2)};
                    break;
            }
            prim.rotation = sample_quat();
            prim.texture_id = 1 + static_cast<int>(rng.uniform_int(8));
            const double r = prim.bounding_radius() + 0.05;
            bool ok = false;
            for (int tries = 0; tries < 64 && !ok; ++tries) {
                prim.position = {rng.uniform(-scene.room_size.x / 2 + r, scene.room_size.x / 2 - r),
                                 rng.uniform(-scene.room_size.y / 2 + r, scene.room_size.y / 2 - r),
                                 rng.uniform(-scene.room_size.z / 2 + r, scene.room_size.z / 2 - r)};
                ok = true;
            }
            if (!ok) {
                placed_all = false;
                break;
            }
            scene.objects.push_back(prim);
        }
        if (!placed_all) continue;
        Vec3 ld = sample_unit_vector();
        if (ld.z < 0.2) ld.z = 0.2 + std::abs(ld.z);
        scene.light_dir = ld.normalized();

        auto sample_camera = [&]() {
            CameraPose cam;
            cam.height = cfg.resolution;
            cam.width = cfg.resolution;
            const double clear = 0.5;
            for (int tries = 0; tries < 200; ++tries) {
                cam.position = {
                    rng.uniform(-scene.room_size.x / 2 + clear, scene.room_size.x / 2 - clear),
                    rng.uniform(-scene.room_size.y / 2 + clear, scene.room_size.y / 2 - clear),
                    rng.uniform(-scene.room_size.z / 2 + clear, scene.room_size.z / 2 - clear)};
                bool clear_of_objects = true;
                for (const auto& obj : scene.objects)
                    if ((obj.position - cam.position).norm() < obj.bounding_radius() + clear)
                        clear_of_objects = false;
                if (!clear_of_objects) continue;
                const Vec3 target{rng.uniform(-0.3, 0.3) * scene.room_size.x,
                                  rng.uniform(-0.3, 0.3) * scene.room_size.y,
                                  rng.uniform(-0.3, 0.3) * scene.room_size.z};
                if ((target - cam.position).norm() < 0.5) continue;
                cam.orientation = Quat::look_at(cam.position, target, {0, 0, 1});
                return cam;
            }
            throw Error("sample_scene: camera placement failed");
        };

        const CameraPose cam1 = sample_camera();
        const CameraPose cam2 = sample_camera();

        // coarse mutual visibility on a subsampled grid
        auto visibility = [&](const CameraPose& a, const CameraPose& b) {
            const int step = std::max(1, cfg.resolution / 16);
            int total = 0, seen = 0;
            for (int y = 0; y < a.height; y += step)
                for (int x = 0; x < a.width; x += step) {
                    ++total;
                    const RayHit hit = trace_ray(scene, a.position, a.pixel_ray(y, x));
                    double px, py;
                    if (!b.project(hit.point, px, py)) continue;
                    if (px < 0 || px > b.width - 1 || py < 0 || py > b.height - 1) continue;
                    const Vec3 diff = hit.point - b.position;
                    const double dist = diff.norm();
                    if (dist < 1e-9) continue;
                    const RayHit back = trace_ray(scene, b.position, diff * (1.0 / dist));
                    if ((back.point - hit.point).norm() <= cfg.epsilon) ++seen;
                }
            return total > 0 ? static_cast<double>(seen) / total : 0.0;
        };
        if (visibility(cam1, cam2) < cfg.min_mutual_visibility) continue;
        if (visibility(cam2, cam1) < cfg.min_mutual_visibility) continue;

        scene.validate();
        cam1.validate(scene);
        cam2.validate(scene);
        return {scene, cam1, cam2};
    }
    throw Error("sample_scene: no valid scene/camera pair after max attempts");
}

PairRecordPaths pair_record_paths(const std::string& dir, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pair_%06d", index);
    const std::string stem = dir + "/" + buf;
    return {stem + "_a.png", stem + "_b.png", stem + ".oxcr"};
}

void write_correspondence(const std::string& path, const CorrespondenceMap& corr) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("write_correspondence: cannot open " + path);
    f.write("OXCR", 4);
    const uint32_t h = static_cast<uint32_t>(corr.height), w = static_cast<uint32_t>(corr.width);
    f.write(reinterpret_cast<const char*>(&h), 4);
    f.write(reinterpret_cast<const char*>(&w), 4);
    const size_t n = static_cast<size_t>(corr.height) * corr.width;
    for (size_t i = 0; i < n; ++i) {
        const int32_t row = corr.ty[i], col = corr.tx[i];
        f.write(reinterpret_cast<const char*>(&row), 4);
        f.write(reinterpret_cast<const char*>(&col), 4);
        f.put(static_cast<char>(corr.valid[i]));
    }
    OXEL_CHECK(f.good(), "write_correspondence: short write");
}

CorrespondenceMap read_correspondence(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_correspondence: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "OXCR", 4) != 0)
        throw IoError("read_correspondence: bad magic in " + path);
    uint32_t h = 0, w = 0;
    f.read(reinterpret_cast<char*>(&h), 4);
    f.read(reinterpret_cast<char*>(&w), 4);
    OXEL_CHECK(f.good() && h > 0 && w > 0, "read_correspondence: corrupt header");
    CorrespondenceMap corr;
    corr.height = static_cast<int>(h);
    corr.width = static_cast<int>(w);
    const size_t n = static_cast<size_t>(h) * w;
    corr.tx.resize(n);
    corr.ty.resize(n);
    corr.valid.resize(n);
    for (size_t i = 0; i < n; ++i) {
        int32_t row, col;
        f.read(reinterpret_cast<char*>(&row), 4);
        f.read(reinterpret_cast<char*>(&col), 4);
        const int v = f.get();
        corr.ty[i] = row;
        corr.tx[i] = col;
        corr.valid[i] = static_cast<uint8_t>(v);
    }
    OXEL_CHECK(f.good(), "read_correspondence: truncated file");
    return corr;
}

}  // namespace oxel
