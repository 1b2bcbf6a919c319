/**
 * Acceptance gate for the figure pipeline: numbers reported in the JSON
 * sidecar must agree with the solver's own manifest diagnostics to 1e-12,
 * so the figures never drift from the simulation they claim to depict.
 */

import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { renderComparison, sidecarPath } from "../src/figure.js";

const FIXTURES = join(__dirname, "fixtures");

interface Manifest {
  diagnostics: {
    max_density: number;
    l1_error_rho: number;
    delta_shock_metric: number;
  };
}

function loadManifest(name: string): Manifest {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf8"));
}

describe("acceptance", () => {
  it("criterion 11: sidecar metrics match solver manifests to 1e-12", () => {
    const out = join(mkdtempSync(join(tmpdir(), "qbmm-acc-")), "comparison.svg");
    renderComparison({
      inputs: [
        { label: "EQMOM", path: join(FIXTURES, "riemann-kpa0-eqmom-snapshot-000.csv") },
        { label: "QMOM", path: join(FIXTURES, "riemann-kpa0-qmom-snapshot-000.csv") },
      ],
      oracle: join(FIXTURES, "oracle-kpa0.csv"),
      output: out,
    });
    const sidecar = JSON.parse(readFileSync(sidecarPath(out), "utf8"));
    const manifests = {
      EQMOM: loadManifest("riemann-kpa0-eqmom-manifest.json"),
      QMOM: loadManifest("riemann-kpa0-qmom-manifest.json"),
    };

    let worst = 0;
    for (const [label, manifest] of Object.entries(manifests)) {
      const curve = sidecar.curves[label];
      const l1Diff = Math.abs(curve.l1_error_rho - manifest.diagnostics.l1_error_rho);
      const peakDiff = Math.abs(curve.peak_density - manifest.diagnostics.max_density);
      worst = Math.max(worst, l1Diff, peakDiff);
    }

    const passed = worst <= 1e-12;
    console.log(
      `[criterion 11] sidecar metrics vs solver manifest: ` +
        `${passed ? "PASS" : "FAIL"} (worst abs diff ${worst.toExponential(3)}, tol 1e-12)`,
    );
    expect(worst).toBeLessThanOrEqual(1e-12);
  });
});
