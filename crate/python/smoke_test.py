"""Quick end-to-end check of the compiled extension."""

import math

import surfkin


def main():
    out = surfkin.run("check", '[surface]\nkind = "torus"\n[grid]\nsize = "16x16"\n')
    assert out["passed"], out["report"]
    names = [c["name"] for c in out["report"]["checks"]]
    assert "gauss[principal]" in names, names

    p = surfkin.surface_point('[surface]\nkind = "sphere"\nradius = 2.0\n', 1.0, 0.5)
    assert abs(p["gaussian_curvature"] - 0.25) < 1e-12
    assert p["umbilic"]

    job = '[surface]\nkind = "catenoid"\n[deformation]\nkind = "bonnet"\nalpha = 0.7\n'
    k = surfkin.kinematics(job, 0.3, 0.2)
    assert max(k["w_s"], k["w_d"], k["w_b"]) < 1e-20
    assert abs(k["lambda1"] - 1.0) < 1e-12

    c, s = math.cos(0.4), math.sin(0.4)
    f = [[2 * c, -s, 0.0], [2 * s, c, 0.0], [0.0, 0.0, 0.0]]
    d = surfkin.polar(f, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    assert abs(d["lambda1"] * d["lambda2"] - 2.0) < 1e-12
    assert d["defect"] < 1e-12

    mesh = surfkin.run("export-mesh", '[surface]\nkind = "sphere"\n[grid]\nsize = "8x8"\n')
    assert mesh["report"] is None
    assert sum(l.startswith("v ") for l in mesh["meshes"]["source.obj"].splitlines()) == 81

    try:
        surfkin.run("check", "[surface]\nkind = 'klein'\n")
    except ValueError as e:
        assert "klein" in str(e)
    else:
        raise AssertionError("bad surface accepted")
    print("smoke test ok")


if __name__ == "__main__":
    main()
