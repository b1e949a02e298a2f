#!/usr/bin/env node

import { exportCheckpoint } from './export';

const helpMessage = `
Usage: nrpw-exporter export --src PATH --out DIR --include REGEX [--exclude REGEX]

Convert a layers-model checkpoint (model.json plus weight shards) into a
.nrpw weight file and an architecture skeleton for hand editing.

  --src PATH       checkpoint model.json
  --out DIR        output directory (created if missing); receives
                   weights.nrpw and arch.json
  --include REGEX  weight names to export; each match must be a 4-D
                   float32 conv kernel
  --exclude REGEX  drop matching names from the include set

A weight named "<layer>/kernel" is exported as layer "<layer>". The export
manifest is printed to stdout. Connectivity in arch.json is only a
sequential guess and is flagged "verified": false; edit the file before
feeding it to a planner.

Example:

  nrpw-exporter export --src ckpt/model.json --out exported --include 'conv.*/kernel'
`.trim();

function parseFlags(args: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < args.length; i += 2) {
    const key = args[i];
    if (!key.startsWith('--') || i + 1 >= args.length) {
      throw new Error(`expected "--flag value" pairs, got "${args.slice(i).join(' ')}"`);
    }
    flags.set(key.slice(2), args[i + 1]);
  }
  return flags;
}

function main(): void {
  const args = process.argv.slice(2);

  if (args.includes('--help') || args.includes('-h')) {
    console.log(helpMessage);
    process.exit(0);
  }

  if (args[0] !== 'export') {
    console.error(helpMessage);
    process.exit(1);
  }

  try {
    const flags = parseFlags(args.slice(1));
    for (const key of flags.keys()) {
      if (!['src', 'out', 'include', 'exclude'].includes(key)) {
        throw new Error(`unknown flag --${key}`);
      }
    }
    for (const key of ['src', 'out', 'include']) {
      if (!flags.has(key)) {
        throw new Error(`missing required flag --${key}`);
      }
    }
    const manifest = exportCheckpoint(
      flags.get('src')!, flags.get('out')!, flags.get('include')!,
      flags.get('exclude') ?? null);
    console.log(JSON.stringify(manifest, null, 2));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  }
}

main();
