#include "wayplan/mat.hpp"

namespace wayplan {

Mat matmul(const Mat& a, const Mat& b) {
    assert(a.cols() == b.rows());
    Mat out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    assert(a.rows() == b.rows());
    Mat out(a.cols(), b.cols());
    for (int k = 0; k < a.rows(); ++k) {
        for (int i = 0; i < a.cols(); ++i) {
            double aki = a(k, i);
            if (aki == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
        }
    }
    return out;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    assert(a.cols() == b.cols());
    Mat out(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.rows(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
            out(i, j) = s;
        }
    }
    return out;
}

Mat transpose(const Mat& a) {
    Mat out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

} // namespace wayplan
