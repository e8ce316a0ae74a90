#include "anthro/synth.hpp"

#include "anthro/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

namespace anthro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double deg(double d) { return d * kPi / 180.0; }

// std::normal_distribution is implementation-defined; Box-Muller over the raw
// 64-bit engine output keeps datasets bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() // (0, 1)
    {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    double sample(const Gaussian& g)
    {
        const double z = std::clamp(normal(), -3.0, 3.0);
        return g.mean + g.std * z;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum Bone : int {
    kTorso,
    kHead,
    kUpperArmL,
    kUpperArmR,
    kForearmL,
    kForearmR,
    kThighL,
    kThighR,
    kShankL,
    kShankR,
    kBoneCount
};

struct HeadShape {
    Vec3 center;
    double ax, ay, az;
    double nose_h, nose_w, brow_h, chin_h, cheek_h;
    std::array<double, 6> coeff;

    static double bump(const Vec3& u, const Vec3& at, double width)
    {
        const double ang = std::acos(std::clamp(u.dot(at.normalized()), -1.0, 1.0));
        return std::exp(-(ang / width) * (ang / width));
    }

    // Star-shaped radial function about `center`; u must be unit length.
    double radius(const Vec3& u) const
    {
        const double e = 1.0 / std::sqrt((u.x() / ax) * (u.x() / ax) + (u.y() / ay) * (u.y() / ay) +
                                         (u.z() / az) * (u.z() / az));
        const double x = u.x(), y = u.y(), z = u.z();
        const double low = coeff[0] * x * y + coeff[1] * y * z + coeff[2] * z * x +
                           coeff[3] * (x * x - y * y) + coeff[4] * (3 * z * z - 1) + coeff[5] * y * (5 * y * y - 3);
        double r = e * (1.0 + low);
        r += nose_h * bump(u, Vec3(0, -0.1, 1), nose_w);
        r += brow_h * bump(u, Vec3(0, 0.35, 1), 0.3);
        r += chin_h * bump(u, Vec3(0, -0.78, 0.62), 0.3);
        r += cheek_h * (bump(u, Vec3(0.5, -0.2, 0.85), 0.3) + bump(u, Vec3(-0.5, -0.2, 0.85), 0.3));
        return r;
    }

    Vec3 surface(const Vec3& dir) const
    {
        const Vec3 u = dir.normalized();
        return center + radius(u) * u;
    }
};

struct Skeleton {
    double hw, thigh, shank, torso, torso_w, torso_d, sw, upper_arm, forearm, neck;
    double r_upper_arm, r_forearm, r_thigh, r_shank;
    HeadShape head;
    double hip_flex, knee_flex, shoulder_flex, elbow_flex, head_yaw, head_pitch;
};

Skeleton sample_skeleton(Rng& rng, const BodyDistribution& d)
{
    Skeleton s{};
    s.hw = rng.sample(d.hip_half_width);
    s.thigh = rng.sample(d.thigh_length);
    s.shank = rng.sample(d.shank_length);
    s.torso = rng.sample(d.torso_length);
    s.torso_w = rng.sample(d.torso_half_width);
    s.torso_d = rng.sample(d.torso_half_depth);
    s.sw = rng.sample(d.shoulder_half_width);
    s.upper_arm = rng.sample(d.upper_arm_length);
    s.forearm = rng.sample(d.forearm_length);
    s.neck = rng.sample(d.neck_length);
    s.r_upper_arm = rng.sample(d.upper_arm_radius);
    s.r_forearm = rng.sample(d.forearm_radius);
    s.r_thigh = rng.sample(d.thigh_radius);
    s.r_shank = rng.sample(d.shank_radius);
    auto& h = s.head;
    h.ax = rng.sample(d.head_half_width);
    h.ay = rng.sample(d.head_half_height);
    h.az = rng.sample(d.head_half_depth);
    h.nose_h = rng.sample(d.nose_height);
    h.nose_w = rng.sample(d.nose_width_rad);
    h.brow_h = rng.sample(d.brow_height);
    h.chin_h = rng.sample(d.chin_height);
    h.cheek_h = rng.sample(d.cheek_height);
    for (auto& c : h.coeff) c = rng.sample(d.head_shape_coeff);
    s.hip_flex = deg(rng.sample(d.hip_flexion_deg));
    s.knee_flex = deg(rng.sample(d.knee_flexion_deg));
    s.shoulder_flex = deg(rng.sample(d.shoulder_flexion_deg));
    s.elbow_flex = deg(rng.sample(d.elbow_flexion_deg));
    s.head_yaw = deg(rng.sample(d.head_yaw_deg));
    s.head_pitch = deg(rng.sample(d.head_pitch_deg));
    // Head sits on the neck top, slightly forward.
    s.head.center = Vec3(0, s.torso + s.neck + 0.75 * h.ay, 12.0);
    return s;
}

struct Builder {
    Mesh mesh;
    std::vector<BodyPart> parts;
    std::vector<int> bones;

    // Appends a closed ring-and-pole surface. rings[i][j] is ring i, segment j.
    void add_closed(const Vec3& pole_a, const std::vector<std::vector<Vec3>>& rings, const Vec3& pole_b,
                    BodyPart part, int bone)
    {
        const int base = static_cast<int>(mesh.vertices.size());
        const int nseg = static_cast<int>(rings.front().size());
        const int nring = static_cast<int>(rings.size());
        auto idx = [&](int i, int j) { return base + 1 + i * nseg + (j % nseg); };
        mesh.vertices.push_back(pole_a);
        for (const auto& ring : rings)
            for (const auto& p : ring) mesh.vertices.push_back(p);
        mesh.vertices.push_back(pole_b);
        const int pb = static_cast<int>(mesh.vertices.size()) - 1;

        std::vector<Triangle> tris;
        for (int j = 0; j < nseg; ++j) tris.push_back({base, idx(0, j + 1), idx(0, j)});
        for (int i = 0; i + 1 < nring; ++i)
            for (int j = 0; j < nseg; ++j) {
                tris.push_back({idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)});
                tris.push_back({idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)});
            }
        for (int j = 0; j < nseg; ++j) tris.push_back({pb, idx(nring - 1, j), idx(nring - 1, j + 1)});

        // Orient outward: positive signed volume.
        double vol = 0.0;
        for (const auto& t : tris)
            vol += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
        if (vol < 0)
            for (auto& t : tris) std::swap(t[1], t[2]);
        mesh.triangles.insert(mesh.triangles.end(), tris.begin(), tris.end());
        parts.resize(mesh.vertices.size(), part);
        bones.resize(mesh.vertices.size(), bone);
    }

    // Elliptic tube from a to b with ellipsoidal end caps. `side` fixes the
    // first cross-section axis (projected perpendicular to the tube axis).
    void add_tube(const Vec3& a, const Vec3& b, const Vec3& side, double r1, double r2, double cap_a,
                  double cap_b, BodyPart part, int bone, int nseg = 20, int nbody = 8, int ncap = 4)
    {
        const double len = (b - a).norm();
        const Vec3 w = (b - a) / len;
        const Vec3 e1 = (side - side.dot(w) * w).normalized();
        const Vec3 e2 = w.cross(e1);
        std::vector<std::pair<double, double>> prof; // (t along axis, scale)
        for (int k = 1; k <= ncap; ++k) {
            const double psi = 0.5 * kPi * k / ncap;
            prof.emplace_back(-cap_a * std::cos(psi), std::sin(psi));
        }
        for (int k = 1; k < nbody; ++k) prof.emplace_back(len * k / nbody, 1.0);
        for (int k = ncap; k >= 1; --k) {
            const double psi = 0.5 * kPi * k / ncap;
            prof.emplace_back(len + cap_b * std::cos(psi), std::sin(psi));
        }
        std::vector<std::vector<Vec3>> rings;
        for (const auto& [t, sc] : prof) {
            std::vector<Vec3> ring;
            for (int j = 0; j < nseg; ++j) {
                const double phi = 2.0 * kPi * j / nseg;
                ring.push_back(a + t * w + sc * (r1 * std::cos(phi) * e1 + r2 * std::sin(phi) * e2));
            }
            rings.push_back(std::move(ring));
        }
        add_closed(a - cap_a * w, rings, b + cap_b * w, part, bone);
    }

    void add_head(const HeadShape& h, int nlat = 48, int nlon = 96)
    {
        std::vector<std::vector<Vec3>> rings;
        for (int i = 1; i < nlat; ++i) {
            const double th = kPi * i / nlat;
            std::vector<Vec3> ring;
            for (int j = 0; j < nlon; ++j) {
                const double ph = 2.0 * kPi * j / nlon;
                ring.push_back(h.surface(Vec3(std::sin(th) * std::sin(ph), std::cos(th), std::sin(th) * std::cos(ph))));
            }
            rings.push_back(std::move(ring));
        }
        add_closed(h.surface(Vec3(0, 1, 0)), rings, h.surface(Vec3(0, -1, 0)), BodyPart::Head, kHead);
    }
};

Eigen::Isometry3d rotation_about(const Vec3& pivot, const Vec3& axis, double angle)
{
    Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
    T.translate(pivot);
    T.rotate(Eigen::AngleAxisd(angle, axis.normalized()));
    T.translate(-pivot);
    return T;
}

struct Attached {
    int id;
    Vec3 pos;
    int bone;
};

struct StandingSubject {
    Builder body;
    std::vector<Attached> landmarks;
    std::array<Eigen::Isometry3d, kBoneCount> sitting;
};

StandingSubject build_standing(const Skeleton& s)
{
    StandingSubject out;
    auto& b = out.body;
    auto& L = out.landmarks;
    const Vec3 X(1, 0, 0), Y(0, 1, 0), Z(0, 0, 1);
    const double abduction = deg(8.0);

    // Torso and neck are one rigid unit.
    b.add_tube(Vec3(0, -40, 0), Vec3(0, s.torso, 0), X, s.torso_w, s.torso_d, 70, 25, BodyPart::Torso, kTorso,
               28, 10, 4);
    const Vec3 neck_top(0, s.torso + s.neck, 5);
    b.add_tube(Vec3(0, s.torso - 10, 0), neck_top, X, 0.55 * s.head.ax, 0.55 * s.head.az, 10, 10,
               BodyPart::Neck, kTorso, 20, 6, 2);
    b.add_head(s.head);

    const double clav_y = s.torso - 5.0;
    L.push_back({lm::RtClavicale, Vec3(-40, clav_y, 0.85 * s.torso_d), kTorso});
    L.push_back({lm::LtClavicale, Vec3(40, clav_y, 0.85 * s.torso_d), kTorso});
    L.push_back({lm::Suprasternale, Vec3(0, s.torso - 15, 0.9 * s.torso_d), kTorso});
    L.push_back({lm::Cervicale, Vec3(0, s.torso + 10, -0.5 * s.head.az), kTorso});

    const auto& h = s.head;
    L.push_back({lm::Sellion, h.surface(Vec3(0, 0.17, 1)), kHead});
    L.push_back({lm::RtInfraorbitale, h.surface(Vec3(-0.33, 0.02, 1)), kHead});
    L.push_back({lm::LtInfraorbitale, h.surface(Vec3(0.33, 0.02, 1)), kHead});
    L.push_back({lm::Supramenton, h.surface(Vec3(0, -0.78, 0.62)), kHead});
    L.push_back({lm::RtTragion, h.surface(Vec3(-1, 0.0, -0.08)), kHead});
    L.push_back({lm::LtTragion, h.surface(Vec3(1, 0.0, -0.08)), kHead});
    L.push_back({lm::RtGonion, h.surface(Vec3(-0.8, -0.55, 0.1)), kHead});
    L.push_back({lm::LtGonion, h.surface(Vec3(0.8, -0.55, 0.1)), kHead});

    out.sitting.fill(Eigen::Isometry3d::Identity());
    out.sitting[kHead] = rotation_about(neck_top, Y, s.head_yaw) * rotation_about(neck_top, X, s.head_pitch);

    for (int sgn : {-1, 1}) { // -1 right, +1 left
        const bool left = sgn > 0;
        const int upper = left ? kUpperArmL : kUpperArmR;
        const int fore = left ? kForearmL : kForearmR;
        const Vec3 shoulder(sgn * s.sw, s.torso - 40, 0);
        const Vec3 dir(sgn * std::sin(abduction), -std::cos(abduction), 0);
        const Vec3 elbow = shoulder + s.upper_arm * dir;
        const Vec3 wrist = elbow + s.forearm * dir;
        // Elbow flexion axis; the epicondyle landmark sits on it.
        const Vec3 hinge = dir.cross(Z).normalized();
        const Vec3 lateral = hinge.x() * sgn > 0 ? hinge : Vec3(-hinge);
        b.add_tube(shoulder, elbow, Z, s.r_upper_arm, s.r_upper_arm, s.r_upper_arm, 0.8 * s.r_upper_arm,
                   BodyPart::Arm, upper);
        b.add_tube(elbow, wrist, Z, s.r_forearm, s.r_forearm, 0.8 * s.r_forearm, 0.5 * s.r_forearm, BodyPart::Arm,
                   fore);
        b.add_tube(wrist, wrist + 170.0 * dir, Z, 0.6 * s.r_forearm + 12, 0.5 * s.r_forearm, 10, 25,
                   BodyPart::Arm, fore, 16, 4, 3);

        // Acromion lies on the shoulder flexion axis (through the joint along X).
        L.push_back({left ? lm::LtAcromion : lm::RtAcromion, shoulder + Vec3(sgn * 35.0, 0, 0), kTorso});
        L.push_back({left ? lm::LtElbow : lm::RtElbow, elbow + 0.85 * s.r_upper_arm * lateral, upper});
        L.push_back({left ? lm::LtWrist : lm::RtWrist, wrist + 0.8 * s.r_forearm * lateral + Vec3(0, 0, 8), fore});

        const auto T_upper = rotation_about(shoulder, X, -s.shoulder_flex);
        out.sitting[upper] = T_upper;
        out.sitting[fore] = T_upper * rotation_about(elbow, hinge, s.elbow_flex);

        const int thigh = left ? kThighL : kThighR;
        const int shank = left ? kShankL : kShankR;
        const Vec3 hip(sgn * s.hw, 0, 0);
        const Vec3 knee = hip - Vec3(0, s.thigh, 0);
        const Vec3 ankle = knee - Vec3(0, s.shank, 0);
        b.add_tube(hip, knee, Z, s.r_thigh, s.r_thigh, 0.8 * s.r_thigh, 0.7 * s.r_thigh, BodyPart::Leg, thigh);
        b.add_tube(knee, ankle, Z, s.r_shank, s.r_shank, 0.7 * s.r_shank, 0.5 * s.r_shank, BodyPart::Leg, shank);
        b.add_tube(ankle + Vec3(0, -40, -30), ankle + Vec3(0, -55, 170), X, 42, 30, 20, 20, BodyPart::Leg, shank,
                   16, 4, 3);

        // Trochanterion and femoral epicondyle lie on the hip and knee flexion
        // axes (along X), so both survive the sitting rotations exactly.
        L.push_back({left ? lm::LtTrochanterion : lm::RtTrochanterion, Vec3(sgn * (s.hw + 70.0), 0, 0), kTorso});
        L.push_back({left ? lm::LtKnee : lm::RtKnee, knee + Vec3(sgn * 0.8 * s.r_thigh, 0, 0), thigh});
        L.push_back({left ? lm::LtAnkle : lm::RtAnkle, ankle + Vec3(sgn * 0.7 * s.r_shank, 0, -10), shank});

        const auto T_thigh = rotation_about(hip, X, -s.hip_flex);
        out.sitting[thigh] = T_thigh;
        out.sitting[shank] = T_thigh * rotation_about(knee, X, s.knee_flex);
    }
    return out;
}

} // namespace

void SynthParams::validate() const
{
    if (n_subjects < 1) throw InvalidArgument("n_subjects must be >= 1");
    if (!(landmark_noise_mm >= 0.0) || !std::isfinite(landmark_noise_mm))
        throw InvalidArgument("landmark_noise_mm must be a finite value >= 0");
    if (poses.empty()) throw InvalidArgument("at least one pose required");
}

std::string synth_subject_id(int index)
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%04d", index + 1);
    return buf;
}

Dataset synth_population(const SynthParams& params)
{
    params.validate();
    const std::set<Pose> wanted(params.poses.begin(), params.poses.end());
    Rng shape_rng(params.seed);
    Rng noise_rng(params.seed ^ 0x9E3779B97F4A7C15ull);

    Dataset ds;
    for (int i = 0; i < params.n_subjects; ++i) {
        const Skeleton sk = sample_skeleton(shape_rng, params.body);
        const StandingSubject st = build_standing(sk);
        for (Pose pose : {Pose::Standing, Pose::Sitting}) {
            // Noise is drawn for both poses regardless of the selection.
            std::vector<Vec3> noise;
            for (std::size_t k = 0; k < st.landmarks.size(); ++k) {
                const double nx = noise_rng.normal(), ny = noise_rng.normal(), nz = noise_rng.normal();
                noise.emplace_back(nx, ny, nz);
            }
            if (!wanted.count(pose)) continue;

            SubjectRecord rec;
            rec.mesh = st.body.mesh;
            rec.vertex_parts = st.body.parts;
            rec.mesh.subject_id = synth_subject_id(i);
            rec.mesh.pose = pose;
            rec.landmarks.subject_id = rec.mesh.subject_id;
            rec.landmarks.pose = pose;
            const bool sit = pose == Pose::Sitting;
            if (sit)
                for (std::size_t v = 0; v < rec.mesh.vertices.size(); ++v)
                    rec.mesh.vertices[v] = st.sitting[st.body.bones[v]] * rec.mesh.vertices[v];
            for (std::size_t k = 0; k < st.landmarks.size(); ++k) {
                const auto& a = st.landmarks[k];
                Vec3 p = sit ? Vec3(st.sitting[a.bone] * a.pos) : a.pos;
                if (params.landmark_noise_mm > 0) p += params.landmark_noise_mm * noise[k];
                rec.landmarks.set(a.id, p);
            }
            ds.records.push_back(std::move(rec));
        }
    }
    return ds;
}

} // namespace anthro
