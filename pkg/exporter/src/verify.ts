import * as fs from 'node:fs';

import { parseWeights } from './format';
import { layerNameOf, ExportError } from './export';
import { hwioToOihw, readCheckpoint } from './tfjs';

export interface ValueDiff {
  layer: string;
  index: number;
}

export interface VerifyReport {
  ok: boolean;
  /** Layers present in the .nrpw with no matching checkpoint kernel. */
  missing: string[];
  /** Layers whose .nrpw shape disagrees with the checkpoint shape. */
  shapeMismatches: string[];
  /** Flat indices whose 32-bit patterns differ, capped at maxDiffs. */
  diffs: ValueDiff[];
  truncated: boolean;
}

const MAX_DIFFS = 16;

/**
 * Check an exported .nrpw against its source checkpoint value by value.
 * Every layer in the file must map back (by name) to a 4-D float32 kernel
 * in the checkpoint and match it bit for bit after the same reordering the
 * exporter applies. Comparison is on raw 32-bit patterns, so it admits no
 * tolerance at all.
 */
export function verifyExport(src: string, nrpwPath: string): VerifyReport {
  const kernels = new Map<string, { shape: number[]; bytes: Buffer }>();
  for (const w of readCheckpoint(src)) {
    if (w.shape.length === 4 && w.dtype === 'float32') {
      kernels.set(layerNameOf(w.name), { shape: w.shape, bytes: w.bytes });
    }
  }

  let blob: Buffer;
  try {
    blob = fs.readFileSync(nrpwPath);
  } catch (err) {
    throw new ExportError(`cannot read weights file ${nrpwPath}: ${err}`);
  }

  const report: VerifyReport = {
    ok: true, missing: [], shapeMismatches: [], diffs: [], truncated: false,
  };
  for (const tensor of parseWeights(blob)) {
    const kernel = kernels.get(tensor.name);
    if (kernel === undefined) {
      report.missing.push(tensor.name);
      report.ok = false;
      continue;
    }
    const [kh, kw, inC, outC] = kernel.shape;
    if (outC !== tensor.out || inC !== tensor.in || kh !== tensor.kh || kw !== tensor.kw) {
      report.shapeMismatches.push(tensor.name);
      report.ok = false;
      continue;
    }
    const want = hwioToOihw(kernel.bytes, kernel.shape);
    const wantBits = new Uint32Array(want.buffer);
    const gotBits = new Uint32Array(tensor.data.buffer);
    for (let i = 0; i < wantBits.length; i++) {
      if (gotBits[i] !== wantBits[i]) {
        report.ok = false;
        if (report.diffs.length < MAX_DIFFS) {
          report.diffs.push({ layer: tensor.name, index: i });
        } else {
          report.truncated = true;
        }
      }
    }
  }
  return report;
}

export function formatVerifyReport(report: VerifyReport): string {
  if (report.ok) {
    return 'verify: PASS';
  }
  const lines = ['verify: FAIL'];
  for (const name of report.missing) {
    lines.push(`  layer ${name}: not found in checkpoint`);
  }
  for (const name of report.shapeMismatches) {
    lines.push(`  layer ${name}: shape differs from checkpoint`);
  }
  for (const d of report.diffs) {
    lines.push(`  layer ${d.layer}: value mismatch at index ${d.index}`);
  }
  if (report.truncated) {
    lines.push('  ... further mismatches omitted');
  }
  return lines.join('\n');
}
