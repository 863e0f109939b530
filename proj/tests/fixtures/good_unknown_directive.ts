@problemName oddball
@somethingNew here
@equalLength true
@seriesLength 2
@classLabel true one two
@data
1,2:one
3,4:two
