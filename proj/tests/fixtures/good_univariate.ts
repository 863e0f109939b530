# single dimension with negative and exponent-form values
@problemName uni
@univariate true
@equalLength true
@seriesLength 4
@classLabel true p q r
@data
-1.5,2e-1,0.0,3.25:p
4,5,6,7:q
0.1,0.2,0.3,0.4:r
8,9,10,11:p
