import { ApiClient, DiagnosticsRequest } from './api';
import { debounce } from './debounce';
import type { DiagnosticsDoc, DistributionDoc } from './types';

export interface WhatIfInputs {
  nPerArm?: number;
  se?: number;
  alpha?: number;
}

/**
 * Live power / type-S / exaggeration readouts against the elicited
 * distribution. Edits are debounced so slider drags produce one request,
 * and the Monte Carlo seed is pinned per panel so identical inputs always
 * show identical numbers.
 */
export class WhatIfPanel {
  private distribution: DistributionDoc | null = null;
  private inputs: WhatIfInputs = {};
  private requestSeq = 0;
  private readonly fire: ((...args: []) => void) & { cancel: () => void };

  constructor(
    private api: ApiClient,
    private onResult: (diag: DiagnosticsDoc) => void,
    private onError: (message: string) => void,
    private seed: number = Math.floor(Math.random() * 2 ** 31),
    debounceMs = 250,
  ) {
    this.fire = debounce(() => void this.refresh(), debounceMs);
  }

  get pinnedSeed(): number {
    return this.seed;
  }

  setDistribution(distribution: DistributionDoc): void {
    this.distribution = distribution;
    this.fire();
  }

  update(inputs: WhatIfInputs): void {
    this.inputs = { ...this.inputs, ...inputs };
    this.fire();
  }

  buildRequest(): DiagnosticsRequest | null {
    if (!this.distribution) return null;
    const req: DiagnosticsRequest = {
      distribution: this.distribution,
      alpha: this.inputs.alpha ?? 0.05,
      seed: this.seed,
    };
    if (this.inputs.se !== undefined) {
      req.se = this.inputs.se;
    } else if (this.inputs.nPerArm !== undefined) {
      req.design = {
        n_treat: this.inputs.nPerArm,
        n_control: this.inputs.nPerArm,
        outcome: { kind: 'binary', conservative: true },
      };
    } else {
      return null;
    }
    return req;
  }

  private async refresh(): Promise<void> {
    const req = this.buildRequest();
    if (!req) return;
    const seq = ++this.requestSeq;
    try {
      const diag = await this.api.diagnostics(req);
      if (seq === this.requestSeq) this.onResult(diag); // drop stale responses
    } catch (err) {
      if (seq === this.requestSeq) {
        this.onError(err instanceof Error ? err.message : String(err));
      }
    }
  }
}
