#include "anthro/head_desc.hpp"

#include "anthro/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace anthro {

namespace {

constexpr double kRankTolerance = 1e-10; // relative to the largest eigenvalue

RowMatrix stack_grids(const std::vector<DepthGrid>& grids)
{
    RowMatrix X(static_cast<Eigen::Index>(grids.size()), kGridCells);
    for (std::size_t i = 0; i < grids.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = grids[i].flatten().transpose();
    return X;
}

struct Spectrum {
    Eigen::VectorXd mean;
    RowMatrix centred;
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // Gram eigenvectors, matching columns
    int rank = 0;
};

Spectrum gram_spectrum(const RowMatrix& samples)
{
    const Eigen::Index n = samples.rows();
    if (n < 2) throw InvalidArgument("PCA needs at least 2 samples");
    Spectrum s;
    s.mean = samples.colwise().mean().transpose();
    s.centred = samples.rowwise() - s.mean.transpose();
    const Eigen::MatrixXd G = par::gram(s.centred) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
    s.values = eig.eigenvalues().reverse();
    s.vectors = eig.eigenvectors().rowwise().reverse();
    const double top = s.values.size() ? s.values(0) : 0.0;
    if (top > 0)
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
            if (s.values(i) > kRankTolerance * top) ++s.rank;
    return s;
}

} // namespace

std::string PcaModel::id() const
{
    return "pca:" + (training_id.empty() ? std::string("anon") : training_id) + ":k" + std::to_string(k());
}

PcaModel pca_fit(const RowMatrix& samples, int k, std::string training_id)
{
    const Eigen::Index n = samples.rows();
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (n >= 2 && k > std::min<Eigen::Index>(n - 1, samples.cols()))
        throw InvalidArgument("k=" + std::to_string(k) + " exceeds min(n-1, dim)");
    Spectrum s = gram_spectrum(samples);

    PcaModel model;
    model.training_id = std::move(training_id);
    if (s.rank == 0) throw RankDeficientError("training data has zero variance");
    if (k > s.rank) {
        if (k > s.rank + 1)
            throw RankDeficientError("requested k=" + std::to_string(k) + " exceeds numerical rank " +
                                     std::to_string(s.rank));
        k = s.rank;
        model.rank_warning = true;
    }

    // v_i = X^T u_i / sqrt((n-1) lambda_i), then re-orthonormalised.
    Eigen::MatrixXd V(samples.cols(), k);
    for (int i = 0; i < k; ++i)
        V.col(i) = s.centred.transpose() * s.vectors.col(i) / std::sqrt(static_cast<double>(n - 1) * s.values(i));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(samples.cols(), k);
    for (int i = 0; i < k; ++i) {
        if (Q.col(i).dot(V.col(i)) < 0) Q.col(i) = -Q.col(i);
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index arg;
        Q.col(i).cwiseAbs().maxCoeff(&arg);
        if (Q(arg, i) < 0) Q.col(i) = -Q.col(i);
    }
    model.mean = s.mean;
    model.components = Q.transpose();
    for (int i = 0; i < k; ++i) model.eigenvalues.push_back(s.values(i));
    for (Eigen::Index i = k; i < s.values.size(); ++i) model.discarded_eigenvalues.push_back(std::max(0.0, s.values(i)));
    return model;
}

int select_k(const std::vector<double>& ev, double fraction, int cap)
{
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    double acc = 0.0;
    int k = 0;
    for (double v : ev) {
        acc += v;
        ++k;
        if (acc >= fraction * total) break;
    }
    return std::max(1, std::min(k, cap));
}

PcaModel train_pca(const std::vector<DepthGrid>& grids, int k, std::string training_id)
{
    return pca_fit(stack_grids(grids), k, std::move(training_id));
}

PcaModel train_pca_auto(const std::vector<DepthGrid>& grids, double fraction, int cap, std::string training_id)
{
    const RowMatrix X = stack_grids(grids);
    const Spectrum s = gram_spectrum(X);
    if (s.rank == 0) throw RankDeficientError("training data has zero variance");
    std::vector<double> ev(s.values.data(), s.values.data() + s.rank);
    return pca_fit(X, std::min(select_k(ev, fraction, cap), s.rank), std::move(training_id));
}

Eigen::VectorXd project_pca(const PcaModel& model, const Eigen::VectorXd& x)
{
    if (x.size() != model.mean.size())
        throw DimensionMismatchError("sample has " + std::to_string(x.size()) + " entries, model expects " +
                                     std::to_string(model.mean.size()));
    return model.components * (x - model.mean);
}

FacePcaDescriptor project_pca(const PcaModel& model, const DepthGrid& grid)
{
    const Eigen::VectorXd c = project_pca(model, grid.flatten());
    return {std::vector<double>(c.data(), c.data() + c.size()), grid.subject_id, grid.pose, model.id()};
}

Eigen::VectorXd reconstruct_pca(const PcaModel& model, const Eigen::VectorXd& coeffs)
{
    if (coeffs.size() != model.k()) throw DimensionMismatchError("coefficient count differs from model k");
    return model.mean + model.components.transpose() * coeffs;
}

namespace {

void write_f64(std::ofstream& out, const double* p, std::size_t n)
{
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            auto bits = std::bit_cast<std::uint64_t>(p[i]);
            char b[8];
            for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xFF);
            out.write(b, 8);
        }
    }
}

void read_f64(std::ifstream& in, double* p, std::size_t n)
{
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            unsigned char b[8];
            in.read(reinterpret_cast<char*>(b), 8);
            std::uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
            p[i] = std::bit_cast<double>(bits);
        }
    }
    if (!in) throw ParseError("PCA sidecar file is truncated");
}

} // namespace

void save_pca_model(const std::filesystem::path& json_path, const PcaModel& model)
{
    auto bin_path = json_path;
    bin_path += ".bin";
    nlohmann::json j;
    j["version"] = 1;
    j["k"] = model.k();
    j["dim"] = model.dim();
    j["eigenvalues"] = model.eigenvalues;
    j["discarded_eigenvalues"] = model.discarded_eigenvalues;
    j["training_id"] = model.training_id;
    j["alpha"] = model.alpha;
    j["rank_warning"] = model.rank_warning;
    j["binary"] = bin_path.filename().string();
    std::ofstream out(json_path);
    if (!out) throw Error("cannot write " + json_path.string());
    out << j.dump(2) << '\n';

    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw Error("cannot write " + bin_path.string());
    write_f64(bin, model.mean.data(), static_cast<std::size_t>(model.mean.size()));
    write_f64(bin, model.components.data(), static_cast<std::size_t>(model.components.size()));
}

PcaModel load_pca_model(const std::filesystem::path& json_path)
{
    std::ifstream in(json_path);
    if (!in) throw NotFoundError("cannot open " + json_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("PCA header: ") + e.what());
    }
    PcaModel m;
    int k = 0, dim = 0;
    try {
        if (j.at("version").get<int>() != 1) throw ParseError("unsupported PCA model version");
        k = j.at("k").get<int>();
        dim = j.at("dim").get<int>();
        m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        m.discarded_eigenvalues = j.value("discarded_eigenvalues", std::vector<double>{});
        m.training_id = j.at("training_id").get<std::string>();
        m.alpha = j.at("alpha").get<double>();
        m.rank_warning = j.value("rank_warning", false);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("PCA header: ") + e.what());
    }
    if (k < 1 || dim < 1 || static_cast<int>(m.eigenvalues.size()) != k)
        throw ParseError("PCA header is inconsistent");
    auto bin_path = json_path.parent_path() / j.value("binary", json_path.filename().string() + ".bin");
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw NotFoundError("cannot open " + bin_path.string());
    m.mean.resize(dim);
    m.components.resize(k, dim);
    read_f64(bin, m.mean.data(), static_cast<std::size_t>(dim));
    read_f64(bin, m.components.data(), static_cast<std::size_t>(k) * dim);
    return m;
}

} // namespace anthro
