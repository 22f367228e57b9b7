#include "cio/run_log.hpp"

#include <sstream>

namespace cio {

using nlohmann::json;

namespace {

json vec(const Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string RunLog::to_jsonl() const {
  std::ostringstream out;
  for (const auto& rec : records) {
    json j;
    j["t"] = rec.t;
    j["truth"] = {{"r", vec(rec.r)},
                  {"q", json::array({rec.q.w(), rec.q.x(), rec.q.y(), rec.q.z()})},
                  {"v", vec(rec.v)},
                  {"omega", vec(rec.omega)},
                  {"gamma", json::array({rec.gamma_l, rec.gamma_r})},
                  {"contact_force", vec(rec.contact_force_body)}};
    j["imu"] = {{"a", vec(rec.imu_a)}, {"omega", vec(rec.imu_omega)}};
    j["wrench"] = {{"F_e", vec(rec.F_e_hat)},
                   {"M_e", vec(rec.M_e_hat)},
                   {"M_w", json::array({rec.M_w_hat_l, rec.M_w_hat_r})},
                   {"W", rec.W},
                   {"event", rec.event}};
    j["filter"] = {{"r", vec(rec.cio_r)},
                   {"v", vec(rec.cio_v)},
                   {"P_v", vec(rec.cio_P_v_diag)},
                   {"updated", rec.cio_updated},
                   {"shadow_v", vec(rec.shadow_v)},
                   {"shadow_P_v", vec(rec.shadow_P_v_diag)}};
    j["cmd"] = {{"v_ref", vec(rec.v_ref)}, {"thrust", rec.thrust}, {"M_in", vec(rec.M_in)}};
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string RunLog::to_csv() const {
  std::ostringstream out;
  out << "t,rx,ry,rz,vx,vy,vz,cio_vx,cio_vy,cio_vz,shadow_vx,shadow_vy,shadow_vz,"
         "cio_verr,shadow_verr,Fe_x,Fe_y,Fe_z,W,event,updated,ref_vx,ref_vy,ref_vz\n";
  char buf[512];
  for (const auto& rec : records) {
    const double cio_err = (rec.cio_v - rec.v).norm();
    const double shadow_err = (rec.shadow_v - rec.v).norm();
    std::snprintf(buf, sizeof(buf),
                  "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                  "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d,%.9g,%.9g,%.9g\n",
                  rec.t, rec.r.x(), rec.r.y(), rec.r.z(), rec.v.x(), rec.v.y(), rec.v.z(),
                  rec.cio_v.x(), rec.cio_v.y(), rec.cio_v.z(), rec.shadow_v.x(),
                  rec.shadow_v.y(), rec.shadow_v.z(), cio_err, shadow_err, rec.F_e_hat.x(),
                  rec.F_e_hat.y(), rec.F_e_hat.z(), rec.W, rec.event ? 1 : 0,
                  rec.cio_updated ? 1 : 0, rec.v_ref.x(), rec.v_ref.y(), rec.v_ref.z());
    out << buf;
  }
  return out.str();
}

std::string RunLog::metrics_text() const { return metrics.dump(2) + "\n"; }

}  // namespace cio
