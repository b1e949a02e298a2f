import * as fs from 'node:fs';
import * as path from 'node:path';

import { serializeWeights, WeightTensor } from './format';
import { CheckpointWeight, hwioToOihw, readCheckpoint } from './tfjs';

export class ExportError extends Error {}

export interface ManifestLayer {
  name: string;
  out: number;
  in: number;
  kh: number;
  kw: number;
}

export interface ExportManifest {
  source: string;
  include: string;
  exclude: string | null;
  layers: ManifestLayer[];
  /** True when the emitted arch skeleton is one unbroken input chain. */
  sequentialAssumption: boolean;
}

/** Checkpoint weight names like "conv1/kernel" map to layer "conv1". */
export function layerNameOf(weightName: string): string {
  return weightName.replace(/\/kernel$/, '');
}

export function compilePattern(pattern: string, role: string): RegExp {
  try {
    return new RegExp(pattern);
  } catch (err) {
    throw new ExportError(`bad ${role} pattern ${JSON.stringify(pattern)}: ${err}`);
  }
}

export interface SelectedKernel {
  layer: string;
  source: CheckpointWeight;
}

export function selectKernels(
  weights: CheckpointWeight[], include: RegExp, exclude: RegExp | null,
): SelectedKernel[] {
  const selected: SelectedKernel[] = [];
  const byLayer = new Map<string, string>();
  for (const w of weights) {
    if (!include.test(w.name)) continue;
    if (exclude !== null && exclude.test(w.name)) continue;
    if (w.shape.length !== 4) {
      throw new ExportError(
        `weight ${w.name} matched but has ${w.shape.length} dimensions, ` +
        `expected a 4-D conv kernel`);
    }
    if (w.dtype !== 'float32') {
      throw new ExportError(
        `weight ${w.name}: unsupported dtype "${w.dtype}" for a conv kernel, expected float32`);
    }
    const layer = layerNameOf(w.name);
    const prior = byLayer.get(layer);
    if (prior !== undefined) {
      throw new ExportError(
        `derived layer name "${layer}" collides: ${prior} and ${w.name}`);
    }
    byLayer.set(layer, w.name);
    selected.push({ layer, source: w });
  }
  if (selected.length === 0) {
    throw new ExportError(`no layers matched include pattern /${include.source}/`);
  }
  return selected;
}

export function toTensor(k: SelectedKernel): WeightTensor {
  const [kh, kw, inC, outC] = k.source.shape;
  return {
    name: k.layer, out: outC, in: inC, kh, kw,
    data: hwioToOihw(k.source.bytes, k.source.shape),
  };
}

/**
 * Architecture skeleton for hand editing. Shapes come from the checkpoint;
 * connectivity is only a guess (each layer fed by its predecessor when the
 * channel counts line up), so the document carries "verified": false and
 * out_h/out_w are left at 1 until the user fills in real feature-map sizes,
 * residual wiring, coupling groups, and pruning floors.
 */
export function archSkeleton(layers: ManifestLayer[]): { doc: object; sequential: boolean } {
  let sequential = true;
  const records = layers.map((layer, i) => {
    let inputs: string[] = [];
    if (i > 0 && layers[i - 1].out === layer.in) {
      inputs = [layers[i - 1].name];
    } else if (i > 0) {
      sequential = false;
    }
    return {
      in_channels: layer.in,
      inputs,
      kh: layer.kh,
      kw: layer.kw,
      min_filters_floor: 1,
      name: layer.name,
      out_channels: layer.out,
      out_h: 1,
      out_w: 1,
      prunable: true,
    };
  });
  return { doc: { layers: records, verified: false }, sequential };
}

export function exportCheckpoint(
  src: string, outDir: string, include: string, exclude: string | null = null,
): ExportManifest {
  const includeRe = compilePattern(include, 'include');
  const excludeRe = exclude === null ? null : compilePattern(exclude, 'exclude');
  const selected = selectKernels(readCheckpoint(src), includeRe, excludeRe);
  const tensors = selected.map(toTensor);
  const layers: ManifestLayer[] = tensors.map(
    (t) => ({ name: t.name, out: t.out, in: t.in, kh: t.kh, kw: t.kw }));
  const { doc, sequential } = archSkeleton(layers);

  fs.mkdirSync(outDir, { recursive: true });
  fs.writeFileSync(path.join(outDir, 'weights.nrpw'), serializeWeights(tensors));
  fs.writeFileSync(path.join(outDir, 'arch.json'), JSON.stringify(doc, null, 2) + '\n');

  return {
    source: src,
    include,
    exclude,
    layers,
    sequentialAssumption: sequential,
  };
}
